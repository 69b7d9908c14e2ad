mod common;

use common::*;
use spz_core::arch::PlanKind;
use spz_core::counters::Opcode;
use spz_core::isa::programs::{merge_chunks, sort_chunks, Bases};
use spz_core::isa::{exec_mssortk, exec_mssortv, exec_mszipv, run_program, ExecError, MReg, VReg};
use spz_core::MachineState;

#[test]
fn pair_instructions_exhaustive_small_r() {
    for r in 2..=4 {
        let n = isa_exhaustive(r).unwrap_or_else(|e| panic!("{e}"));
        assert!(n > 0);
    }
}

#[test]
fn pair_instructions_random_r16() {
    isa_random(16, 16, 10_000).unwrap_or_else(|e| panic!("{e}"));
}

#[test]
fn pair_instructions_random_odd_sizes() {
    for r in [5, 7, 31, 64] {
        isa_random(r as u64, r, 500).unwrap_or_else(|e| panic!("{e}"));
    }
}

#[test]
fn sort_program_reproduces_oracle_memory() {
    let mut rng = rng(100);
    for i in 0..1000 {
        let r = if i % 4 == 0 { [2, 3, 8][i % 3] } else { 16 };
        check_sort_program(&mut rng, r).unwrap_or_else(|e| panic!("case {i}: {e}"));
    }
}

#[test]
fn merge_program_reproduces_oracle_memory() {
    let mut rng = rng(101);
    for i in 0..1000 {
        let r = if i % 4 == 0 { [2, 3, 8][i % 3] } else { 16 };
        check_merge_program(&mut rng, r).unwrap_or_else(|e| panic!("case {i}: {e}"));
    }
}

#[test]
fn program_listing_counts() {
    let b = Bases { keys_in: 0, vals_in: 0, keys_out: 0, vals_out: 0 };
    let mut s = MachineState::new(4, 64);
    let c = run_program(&mut s, &sort_chunks(&b)).unwrap();
    assert_eq!(c.count(Opcode::Mlxe), 4);
    assert_eq!(c.count(Opcode::Mssortk), 1);
    assert_eq!(c.count(Opcode::Mssortv), 1);
    assert_eq!(c.count(Opcode::MmvVo), 2);
    assert_eq!(c.count(Opcode::Msxe), 4);
    assert_eq!(c.total_instructions(), 12);
    let c = run_program(&mut s, &merge_chunks(&b)).unwrap();
    assert_eq!(c.count(Opcode::Mszipk), 1);
    assert_eq!(c.count(Opcode::Mszipv), 1);
    assert_eq!(c.key_instr_total, 1);
    assert_eq!(run_program(&mut s, &[]).unwrap().total_instructions(), 0);
}

#[test]
fn value_instruction_needs_matching_plan() {
    let mut s = MachineState::new(2, 0);
    let (k1, k2, v1, v2) = (MReg(0), MReg(2), MReg(1), MReg(3));
    assert!(matches!(exec_mssortv(&mut s, v1, v2, VReg(0), VReg(1)), Err(ExecError::PlanMismatch(_))));
    exec_mssortk(&mut s, k1, k2, VReg(0), VReg(1)).unwrap();
    assert!(matches!(exec_mszipv(&mut s, v1, v2, VReg(0), VReg(1)), Err(ExecError::PlanMismatch(_))));
    exec_mssortv(&mut s, v1, v2, VReg(0), VReg(1)).unwrap();
}

#[test]
fn tail_lanes_do_not_leak_into_results() {
    // Same cases under different junk must give identical checks.
    let mut r1 = rng(5);
    let mut r2 = rng(6);
    let cases = vec![
        RowCase::new(&mut r1, vec![2, 0, 2], vec![1]),
        RowCase::new(&mut r1, vec![], vec![0, 0, 0, 0]),
    ];
    check_isa_batch(&mut r1, 4, PlanKind::Sort, &cases).unwrap();
    check_isa_batch(&mut r2, 4, PlanKind::Sort, &cases).unwrap();
    let zip = vec![RowCase::new(&mut r1, vec![0, 2], vec![1, 2, 3])];
    check_isa_batch(&mut r1, 4, PlanKind::Zip, &zip).unwrap();
    check_isa_batch(&mut r2, 4, PlanKind::Zip, &zip).unwrap();
}
