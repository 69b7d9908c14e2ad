//! The eight stream instructions, executed against a [`MachineState`].
//!
//! Indexed loads and stores take per-row element offsets (byte address =
//! `base + 4 * offset`) and per-row lengths from vector registers. Key
//! instructions write sorted/merged keys back in place, padded with the
//! sentinel, set the four counter vectors and leave a [`ReorderPlan`] for the
//! paired value instruction.

use std::fmt;

use thiserror::Error;

use crate::arch::{MachineState, MemoryFault, PlanKind, PlanRow, ReorderPlan, NUM_MATRIX_REGS, NUM_VECTOR_REGS};
use crate::counters::{OpCounters, Opcode};
use crate::stream::StreamError;
use crate::systolic::{apply_plan, pair_cycles, sort_functional, zip_functional};
use crate::SENTINEL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MReg(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VReg(pub u8);

impl fmt::Display for MReg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr{}", self.0)
    }
}

impl fmt::Display for VReg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    /// Indexed load of `len[i]` words per row from `base + 4 * off[i]`.
    Mlxe { td: MReg, base: u64, off: VReg, len: VReg },
    /// Indexed store, mirror of `Mlxe`.
    Msxe { ts: MReg, base: u64, off: VReg, len: VReg },
    Mssortk { td1: MReg, td2: MReg, vs1: VReg, vs2: VReg },
    Mssortv { td1: MReg, td2: MReg, vs1: VReg, vs2: VReg },
    Mszipk { td1: MReg, td2: MReg, vs1: VReg, vs2: VReg },
    Mszipv { td1: MReg, td2: MReg, vs1: VReg, vs2: VReg },
    /// `vd <- IC[idx]`.
    MmvVi { vd: VReg, idx: u8 },
    /// `vd <- OC[idx]`.
    MmvVo { vd: VReg, idx: u8 },
    /// Host-level lane-wise add used for pointer bumps.
    Vadd { vd: VReg, vs1: VReg, vs2: VReg },
}

impl Instruction {
    pub fn opcode(&self) -> Option<Opcode> {
        Some(match self {
            Instruction::Mlxe { .. } => Opcode::Mlxe,
            Instruction::Msxe { .. } => Opcode::Msxe,
            Instruction::Mssortk { .. } => Opcode::Mssortk,
            Instruction::Mssortv { .. } => Opcode::Mssortv,
            Instruction::Mszipk { .. } => Opcode::Mszipk,
            Instruction::Mszipv { .. } => Opcode::Mszipv,
            Instruction::MmvVi { .. } => Opcode::MmvVi,
            Instruction::MmvVo { .. } => Opcode::MmvVo,
            Instruction::Vadd { .. } => return None,
        })
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.opcode().map_or("vadd.vv", Opcode::mnemonic);
        match *self {
            Instruction::Mlxe { td: r, base, off, len } | Instruction::Msxe { ts: r, base, off, len } => {
                write!(f, "{m} {r}, {base:#x}, {off}, {len}")
            }
            Instruction::Mssortk { td1, td2, vs1, vs2 }
            | Instruction::Mssortv { td1, td2, vs1, vs2 }
            | Instruction::Mszipk { td1, td2, vs1, vs2 }
            | Instruction::Mszipv { td1, td2, vs1, vs2 } => write!(f, "{m} {td1}, {td2}, {vs1}, {vs2}"),
            Instruction::MmvVi { vd, idx } | Instruction::MmvVo { vd, idx } => write!(f, "{m} {vd}, {idx}"),
            Instruction::Vadd { vd, vs1, vs2 } => write!(f, "{m} {vd}, {vs1}, {vs2}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error(transparent)]
    Memory(#[from] MemoryFault),
    #[error("row {row}: length {len} exceeds R = {r}")]
    LengthExceedsR { row: usize, len: usize, r: usize },
    #[error("row {row}: {source}")]
    Stream { row: usize, source: StreamError },
    #[error("plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("bad operand: {0}")]
    BadOperand(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instruction {index} ({instr}): {source}")]
pub struct ProgramError {
    pub index: usize,
    pub instr: String,
    pub source: ExecError,
}

fn check_m(r: MReg) -> Result<usize, ExecError> {
    let i = r.0 as usize;
    if i >= NUM_MATRIX_REGS {
        return Err(ExecError::BadOperand(format!("{r} outside tr0..tr{}", NUM_MATRIX_REGS - 1)));
    }
    Ok(i)
}

fn check_v(r: VReg) -> Result<usize, ExecError> {
    let i = r.0 as usize;
    if i >= NUM_VECTOR_REGS {
        return Err(ExecError::BadOperand(format!("{r} outside v0..v{}", NUM_VECTOR_REGS - 1)));
    }
    Ok(i)
}

fn check_pair(td1: MReg, td2: MReg) -> Result<(usize, usize), ExecError> {
    let (a, b) = (check_m(td1)?, check_m(td2)?);
    if a == b {
        return Err(ExecError::BadOperand(format!("{td1} used as both registers of a pair")));
    }
    Ok((a, b))
}

/// Per-row lengths from a vector register, each checked against R.
fn lengths(s: &MachineState, v: VReg) -> Result<Vec<usize>, ExecError> {
    let r = s.r();
    let lanes = &s.v[check_v(v)?].lanes;
    lanes
        .iter()
        .enumerate()
        .map(|(row, &len)| {
            let len = len as usize;
            if len > r {
                Err(ExecError::LengthExceedsR { row, len, r })
            } else {
                Ok(len)
            }
        })
        .collect()
}

fn addresses(s: &MachineState, base: u64, off: VReg) -> Result<Vec<u64>, ExecError> {
    Ok(s.v[check_v(off)?].lanes.iter().map(|&o| base.wrapping_add(4 * o as u64)).collect())
}

pub fn exec_mlxe(s: &mut MachineState, td: MReg, base: u64, off: VReg, len: VReg) -> Result<(), ExecError> {
    let t = check_m(td)?;
    let lens = lengths(s, len)?;
    let addrs = addresses(s, base, off)?;
    let rows = lens
        .iter()
        .zip(&addrs)
        .map(|(&l, &a)| s.mem.read_words(a, l))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, words) in rows.into_iter().enumerate() {
        let row = s.tr[t].row_mut(i);
        row.fill(0);
        row[..words.len()].copy_from_slice(&words);
    }
    if s.plan.as_ref().is_some_and(|p| p.references(t)) {
        s.plan = None;
    }
    s.counters.record(Opcode::Mlxe);
    s.counters.row_uops += s.r() as u64;
    Ok(())
}

pub fn exec_msxe(s: &mut MachineState, ts: MReg, base: u64, off: VReg, len: VReg) -> Result<(), ExecError> {
    let t = check_m(ts)?;
    let lens = lengths(s, len)?;
    let addrs = addresses(s, base, off)?;
    // Check every row before writing any.
    for (&l, &a) in lens.iter().zip(&addrs) {
        s.mem.read_words(a, l)?;
    }
    for (i, (&l, &a)) in lens.iter().zip(&addrs).enumerate() {
        let data = s.tr[t].row(i)[..l].to_vec();
        s.mem.write_words(a, &data)?;
    }
    s.counters.record(Opcode::Msxe);
    s.counters.row_uops += s.r() as u64;
    Ok(())
}

fn exec_key(s: &mut MachineState, kind: PlanKind, td1: MReg, td2: MReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    let (t1, t2) = check_pair(td1, td2)?;
    let (la, lb) = (lengths(s, vs1)?, lengths(s, vs2)?);
    let r = s.r();
    let mut results = Vec::with_capacity(r);
    for row in 0..r {
        let a = &s.tr[t1].row(row)[..la[row]];
        let b = &s.tr[t2].row(row)[..lb[row]];
        let sentinel = |keys: &[u32]| keys.iter().position(|&k| k == SENTINEL);
        if let Some(pos) = sentinel(a).or(sentinel(b)) {
            return Err(ExecError::Stream { row, source: StreamError::SentinelKey { pos } });
        }
        let res = match kind {
            PlanKind::Sort => sort_functional(r, a, b),
            PlanKind::Zip => zip_functional(r, a, b),
        }
        .map_err(|source| ExecError::Stream { row, source })?;
        results.push(res);
    }
    let mut plan_rows = Vec::with_capacity(r);
    for (row, res) in results.into_iter().enumerate() {
        for (t, keys) in [(t1, &res.first), (t2, &res.second)] {
            let lanes = s.tr[t].row_mut(row);
            lanes.fill(SENTINEL);
            lanes[..keys.len()].copy_from_slice(keys);
        }
        for side in 0..2 {
            s.ic[side].set(row, res.ic[side]);
            s.oc[side].set(row, res.oc[side]);
        }
        plan_rows.push(res.plan);
    }
    s.plan = Some(ReorderPlan { kind, key_regs: (t1, t2), rows: plan_rows });
    let op = if kind == PlanKind::Sort { Opcode::Mssortk } else { Opcode::Mszipk };
    s.counters.record(op);
    let lens: Vec<(usize, usize)> = la.into_iter().zip(lb).collect();
    s.counters.cycle_estimate += pair_cycles(r, &lens);
    Ok(())
}

fn exec_value(s: &mut MachineState, kind: PlanKind, td1: MReg, td2: MReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    let (t1, t2) = check_pair(td1, td2)?;
    let (la, lb) = (lengths(s, vs1)?, lengths(s, vs2)?);
    let plan = s.plan.as_ref().ok_or_else(|| ExecError::PlanMismatch("no reorder plan".into()))?;
    if plan.kind != kind {
        return Err(ExecError::PlanMismatch(format!("plan is {:?}, instruction needs {kind:?}", plan.kind)));
    }
    let mut outputs = Vec::with_capacity(s.r());
    for (row, p) in plan.rows.iter().enumerate() {
        let PlanRow { la: pa, lb: pb, .. } = *p;
        if (la[row], lb[row]) != (pa, pb) {
            return Err(ExecError::PlanMismatch(format!(
                "row {row}: lengths ({}, {}) but plan recorded ({pa}, {pb})",
                la[row], lb[row]
            )));
        }
        let va = s.tr[t1].row_f32(row)[..pa].to_vec();
        let vb = s.tr[t2].row_f32(row)[..pb].to_vec();
        outputs.push(apply_plan(p, &va, &vb).map_err(|e| ExecError::PlanMismatch(e.to_string()))?);
    }
    for (row, (first, second)) in outputs.into_iter().enumerate() {
        for (t, vals) in [(t1, first), (t2, second)] {
            let lanes = s.tr[t].row_mut(row);
            for (dst, v) in lanes.iter_mut().zip(vals) {
                *dst = v.to_bits();
            }
        }
    }
    s.counters.record(if kind == PlanKind::Sort { Opcode::Mssortv } else { Opcode::Mszipv });
    Ok(())
}

pub fn exec_mssortk(s: &mut MachineState, td1: MReg, td2: MReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    exec_key(s, PlanKind::Sort, td1, td2, vs1, vs2)
}

pub fn exec_mssortv(s: &mut MachineState, td1: MReg, td2: MReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    exec_value(s, PlanKind::Sort, td1, td2, vs1, vs2)
}

pub fn exec_mszipk(s: &mut MachineState, td1: MReg, td2: MReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    exec_key(s, PlanKind::Zip, td1, td2, vs1, vs2)
}

pub fn exec_mszipv(s: &mut MachineState, td1: MReg, td2: MReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    exec_value(s, PlanKind::Zip, td1, td2, vs1, vs2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterKind {
    Input,
    Output,
}

pub fn exec_mmv(s: &mut MachineState, vd: VReg, which: CounterKind, idx: u8) -> Result<(), ExecError> {
    let d = check_v(vd)?;
    if idx > 1 {
        return Err(ExecError::BadOperand(format!("counter index {idx} not in {{0, 1}}")));
    }
    let src = match which {
        CounterKind::Input => &s.ic[idx as usize],
        CounterKind::Output => &s.oc[idx as usize],
    };
    let vals: Vec<u32> = src.counts().iter().map(|&c| c as u32).collect();
    s.v[d].lanes.copy_from_slice(&vals);
    s.counters.record(if which == CounterKind::Input { Opcode::MmvVi } else { Opcode::MmvVo });
    Ok(())
}

pub fn exec_vadd(s: &mut MachineState, vd: VReg, vs1: VReg, vs2: VReg) -> Result<(), ExecError> {
    let (d, a, b) = (check_v(vd)?, check_v(vs1)?, check_v(vs2)?);
    let sum: Vec<u32> = s.v[a].lanes.iter().zip(&s.v[b].lanes).map(|(x, y)| x.wrapping_add(*y)).collect();
    s.v[d].lanes = sum;
    s.counters.bump("vadd", 1);
    Ok(())
}

fn counter_lanes(s: &MachineState) -> String {
    let l = |c: &crate::arch::CounterVector| format!("{:?}", c.counts());
    format!("ic0={} ic1={} oc0={} oc1={}", l(&s.ic[0]), l(&s.ic[1]), l(&s.oc[0]), l(&s.oc[1]))
}

pub fn execute(s: &mut MachineState, instr: &Instruction) -> Result<(), ExecError> {
    match *instr {
        Instruction::Mlxe { td, base, off, len } => exec_mlxe(s, td, base, off, len)?,
        Instruction::Msxe { ts, base, off, len } => exec_msxe(s, ts, base, off, len)?,
        Instruction::Mssortk { td1, td2, vs1, vs2 } => exec_mssortk(s, td1, td2, vs1, vs2)?,
        Instruction::Mssortv { td1, td2, vs1, vs2 } => exec_mssortv(s, td1, td2, vs1, vs2)?,
        Instruction::Mszipk { td1, td2, vs1, vs2 } => exec_mszipk(s, td1, td2, vs1, vs2)?,
        Instruction::Mszipv { td1, td2, vs1, vs2 } => exec_mszipv(s, td1, td2, vs1, vs2)?,
        Instruction::MmvVi { vd, idx } => exec_mmv(s, vd, CounterKind::Input, idx)?,
        Instruction::MmvVo { vd, idx } => exec_mmv(s, vd, CounterKind::Output, idx)?,
        Instruction::Vadd { vd, vs1, vs2 } => exec_vadd(s, vd, vs1, vs2)?,
    }
    if s.trace_log.is_some() {
        let mut line = instr.to_string();
        if matches!(instr, Instruction::Mssortk { .. } | Instruction::Mszipk { .. }) {
            line = format!("{line}  ; {}", counter_lanes(s));
        }
        if let Some(log) = s.trace_log.as_mut() {
            log.push(line);
        }
    }
    Ok(())
}

/// Executes `program` in order. Returns the counters accumulated by this
/// program (they are also added to `s.counters`).
pub fn run_program(s: &mut MachineState, program: &[Instruction]) -> Result<OpCounters, ProgramError> {
    let saved = std::mem::take(&mut s.counters);
    let result = program.iter().enumerate().try_for_each(|(index, instr)| {
        execute(s, instr).map_err(|source| ProgramError { index, instr: instr.to_string(), source })
    });
    let delta = std::mem::replace(&mut s.counters, saved);
    s.counters.absorb(&delta);
    result.map(|()| delta)
}

/// The two canonical chunk programs, with the same register assignment as
/// the reference listings: `tr0`/`tr2` keys, `tr1`/`tr3` values, `v0`/`v1`
/// input lengths, `v2`/`v3` input offsets.
pub mod programs {
    use super::{Instruction, MReg, VReg};

    /// Base addresses of the key/value input and output arrays.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct Bases {
        pub keys_in: u64,
        pub vals_in: u64,
        pub keys_out: u64,
        pub vals_out: u64,
    }

    const TR: [MReg; 4] = [MReg(0), MReg(1), MReg(2), MReg(3)];

    fn v(i: u8) -> VReg {
        VReg(i)
    }

    fn loads(b: &Bases) -> [Instruction; 4] {
        [
            Instruction::Mlxe { td: TR[0], base: b.keys_in, off: v(2), len: v(0) },
            Instruction::Mlxe { td: TR[1], base: b.vals_in, off: v(2), len: v(0) },
            Instruction::Mlxe { td: TR[2], base: b.keys_in, off: v(3), len: v(1) },
            Instruction::Mlxe { td: TR[3], base: b.vals_in, off: v(3), len: v(1) },
        ]
    }

    /// Sorts the chunk pair at offsets `v2`/`v3` of every stream and stores
    /// the results at offsets `v6`/`v7`. Output lengths end up in `v4`/`v5`.
    pub fn sort_chunks(b: &Bases) -> Vec<Instruction> {
        let mut p = loads(b).to_vec();
        let (k1, k2, v1, v2) = (TR[0], TR[2], TR[1], TR[3]);
        p.extend([
            Instruction::Mssortk { td1: k1, td2: k2, vs1: v(0), vs2: v(1) },
            Instruction::Mssortv { td1: v1, td2: v2, vs1: v(0), vs2: v(1) },
            Instruction::MmvVo { vd: v(4), idx: 0 },
            Instruction::MmvVo { vd: v(5), idx: 1 },
            Instruction::Msxe { ts: k1, base: b.keys_out, off: v(6), len: v(4) },
            Instruction::Msxe { ts: v1, base: b.vals_out, off: v(6), len: v(4) },
            Instruction::Msxe { ts: k2, base: b.keys_out, off: v(7), len: v(5) },
            Instruction::Msxe { ts: v2, base: b.vals_out, off: v(7), len: v(5) },
        ]);
        p
    }

    /// One merge step of the chunks at offsets `v2`/`v3`. Appends the merged
    /// tuples at offset `v5` (bumped past them), consumed counts land in
    /// `v6`/`v7` and output lengths in `v8`/`v9`.
    pub fn merge_chunks(b: &Bases) -> Vec<Instruction> {
        let mut p = loads(b).to_vec();
        let (k1, k2, v1, v2) = (TR[0], TR[2], TR[1], TR[3]);
        p.extend([
            Instruction::Mszipk { td1: k1, td2: k2, vs1: v(0), vs2: v(1) },
            Instruction::Mszipv { td1: v1, td2: v2, vs1: v(0), vs2: v(1) },
            Instruction::MmvVi { vd: v(6), idx: 0 },
            Instruction::MmvVi { vd: v(7), idx: 1 },
            Instruction::MmvVo { vd: v(8), idx: 0 },
            Instruction::MmvVo { vd: v(9), idx: 1 },
            Instruction::Msxe { ts: k1, base: b.keys_out, off: v(5), len: v(8) },
            Instruction::Msxe { ts: v1, base: b.vals_out, off: v(5), len: v(8) },
            Instruction::Vadd { vd: v(5), vs1: v(5), vs2: v(8) },
            Instruction::Msxe { ts: k2, base: b.keys_out, off: v(5), len: v(9) },
            Instruction::Msxe { ts: v2, base: b.vals_out, off: v(5), len: v(9) },
            Instruction::Vadd { vd: v(5), vs1: v(5), vs2: v(9) },
        ]);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> MachineState {
        MachineState::new(4, 256)
    }

    #[test]
    fn load_copies_and_zero_fills() {
        let mut s = state();
        s.mem.write_words(0, &[10, 20, 30, 40]).unwrap();
        s.set_vector(0, &[3]);
        s.tr[0].row_mut(0).fill(7);
        exec_mlxe(&mut s, MReg(0), 0, VReg(1), VReg(0)).unwrap();
        assert_eq!(s.tr[0].row(0), &[10, 20, 30, 0]);
        assert_eq!(s.tr[0].row(1), &[0; 4]);
        assert_eq!(s.counters.row_uops, 4);
    }

    #[test]
    fn load_errors() {
        let mut s = state();
        s.set_vector(0, &[5]);
        assert!(matches!(exec_mlxe(&mut s, MReg(0), 0, VReg(1), VReg(0)), Err(ExecError::LengthExceedsR { row: 0, .. })));
        s.set_vector(0, &[1]);
        assert!(matches!(exec_mlxe(&mut s, MReg(0), 256, VReg(1), VReg(0)), Err(ExecError::Memory(_))));
        assert!(matches!(exec_mlxe(&mut s, MReg(16), 0, VReg(1), VReg(0)), Err(ExecError::BadOperand(_))));
    }

    #[test]
    fn store_load_round_trip() {
        let mut s = state();
        for i in 0..4 {
            s.tr[5].row_mut(i).copy_from_slice(&[i as u32, 1, 2, 3]);
        }
        s.set_vector(0, &[4, 2, 0, 1]);
        s.set_vector(1, &[0, 4, 8, 12]);
        exec_msxe(&mut s, MReg(5), 16, VReg(1), VReg(0)).unwrap();
        exec_mlxe(&mut s, MReg(6), 16, VReg(1), VReg(0)).unwrap();
        for (i, &l) in [4usize, 2, 0, 1].iter().enumerate() {
            assert_eq!(s.tr[6].row(i)[..l], s.tr[5].row(i)[..l]);
        }
    }

    #[test]
    fn sort_pair_in_registers() {
        let mut s = MachineState::new(3, 0);
        s.tr[2].row_mut(0).copy_from_slice(&[5, 8, 5]);
        for (i, v) in [1.0f32, 2.0, 3.0].iter().enumerate() {
            s.tr[3].row_mut(0)[i] = v.to_bits();
        }
        s.set_vector(1, &[3]);
        exec_mssortk(&mut s, MReg(0), MReg(2), VReg(0), VReg(1)).unwrap();
        assert_eq!(s.tr[2].row(0), &[5, 8, SENTINEL]);
        assert_eq!(s.oc[1].get(0), 2);
        exec_mssortv(&mut s, MReg(1), MReg(3), VReg(0), VReg(1)).unwrap();
        assert_eq!(&s.tr[3].row_f32(0)[..2], &[4.0, 2.0]);
        exec_mmv(&mut s, VReg(4), CounterKind::Output, 1).unwrap();
        assert_eq!(s.v[4].lanes, vec![2, 0, 0]);
    }

    #[test]
    fn zip_pair_in_registers() {
        let mut s = MachineState::new(3, 0);
        s.tr[0].row_mut(0).copy_from_slice(&[3, 5, 9]);
        s.tr[2].row_mut(0).copy_from_slice(&[2, 5, 8]);
        s.set_vector(0, &[3]);
        s.set_vector(1, &[3]);
        exec_mszipk(&mut s, MReg(0), MReg(2), VReg(0), VReg(1)).unwrap();
        assert_eq!(s.tr[0].row(0), &[2, 3, 5]);
        assert_eq!(s.tr[2].row(0), &[8, SENTINEL, SENTINEL]);
        assert_eq!((s.ic[0].get(0), s.ic[1].get(0), s.oc[0].get(0), s.oc[1].get(0)), (2, 3, 3, 1));
        assert_eq!(s.tr[0].row(1), &[SENTINEL; 3]);
    }

    #[test]
    fn unsorted_zip_names_the_row() {
        let mut s = MachineState::new(3, 0);
        s.tr[0].row_mut(2).copy_from_slice(&[3, 1, 0]);
        s.set_vector(0, &[0, 0, 2]);
        let err = exec_mszipk(&mut s, MReg(0), MReg(2), VReg(0), VReg(1)).unwrap_err();
        assert!(matches!(err, ExecError::Stream { row: 2, .. }), "{err}");
    }

    #[test]
    fn value_instruction_needs_a_matching_plan() {
        let mut s = state();
        assert!(matches!(exec_mssortv(&mut s, MReg(1), MReg(3), VReg(0), VReg(1)), Err(ExecError::PlanMismatch(_))));
        exec_mszipk(&mut s, MReg(0), MReg(2), VReg(0), VReg(1)).unwrap();
        assert!(matches!(exec_mssortv(&mut s, MReg(1), MReg(3), VReg(0), VReg(1)), Err(ExecError::PlanMismatch(_))));
        s.set_vector(0, &[1]);
        assert!(matches!(exec_mszipv(&mut s, MReg(1), MReg(3), VReg(0), VReg(1)), Err(ExecError::PlanMismatch(_))));
    }

    #[test]
    fn loading_a_key_register_drops_the_plan() {
        let mut s = state();
        exec_mssortk(&mut s, MReg(0), MReg(2), VReg(0), VReg(1)).unwrap();
        exec_mlxe(&mut s, MReg(1), 0, VReg(0), VReg(0)).unwrap();
        assert!(s.plan.is_some());
        exec_mlxe(&mut s, MReg(2), 0, VReg(0), VReg(0)).unwrap();
        assert!(s.plan.is_none());
    }

    #[test]
    fn pair_registers_must_differ() {
        let mut s = state();
        assert!(matches!(exec_mssortk(&mut s, MReg(0), MReg(0), VReg(0), VReg(1)), Err(ExecError::BadOperand(_))));
    }

    #[test]
    fn fresh_counters_are_zero() {
        let mut s = state();
        exec_mmv(&mut s, VReg(3), CounterKind::Input, 0).unwrap();
        assert_eq!(s.v[3].lanes, vec![0; 4]);
        assert!(exec_mmv(&mut s, VReg(3), CounterKind::Input, 2).is_err());
    }

    #[test]
    fn program_counts_and_error_index() {
        let mut s = MachineState::new(4, 1024);
        let b = programs::Bases { keys_in: 0, vals_in: 256, keys_out: 512, vals_out: 768 };
        assert_eq!(run_program(&mut s, &[]).unwrap(), OpCounters::default());
        let c = run_program(&mut s, &programs::sort_chunks(&b)).unwrap();
        assert_eq!(c.count(Opcode::Mlxe), 4);
        assert_eq!(c.count(Opcode::Mssortk), 1);
        assert_eq!(c.count(Opcode::Mssortv), 1);
        assert_eq!(c.count(Opcode::MmvVo), 2);
        assert_eq!(c.count(Opcode::Msxe), 4);
        let c = run_program(&mut s, &programs::merge_chunks(&b)).unwrap();
        assert_eq!((c.count(Opcode::Mszipk), c.count(Opcode::Mszipv)), (1, 1));
        assert_eq!(c.extra("vadd"), 2);
        s.set_vector(0, &[9]);
        let err = run_program(&mut s, &programs::sort_chunks(&b)).unwrap_err();
        assert_eq!(err.index, 0);
    }

    #[test]
    fn trace_log_lines() {
        let mut s = state();
        s.enable_trace_log();
        let b = programs::Bases { keys_in: 0, vals_in: 64, keys_out: 128, vals_out: 192 };
        run_program(&mut s, &programs::sort_chunks(&b)).unwrap();
        let log = s.trace_log.as_ref().unwrap();
        assert_eq!(log.len(), 12);
        assert_eq!(log[0], "mlxe.t tr0, 0x0, v2, v0");
        assert!(log[4].starts_with("mssortk.tt tr0, tr2, v0, v1  ; ic0="));
    }
}
