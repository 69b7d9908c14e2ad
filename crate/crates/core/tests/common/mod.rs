#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spz_core::arch::PlanKind;
use spz_core::isa::programs::{merge_chunks, sort_chunks, Bases};
use spz_core::isa::{exec_mssortk, exec_mssortv, exec_mszipk, exec_mszipv, run_program, MReg, VReg};
use spz_core::matrix::{gen_banded, gen_random, gen_skewed, CsrMatrix};
use spz_core::stream::{chunk_merge_oracle, chunk_sort_oracle_ordered, AccumOrder, KeyValueChunk};
use spz_core::{MachineState, SENTINEL};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every sequence over `0..alphabet` of length `0..=max_len`.
pub fn all_sequences(alphabet: u32, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 0..alphabet {
                let mut t: Vec<u32> = s.clone();
                t.push(k);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every strictly ascending sequence over `0..alphabet` of length `<= max_len`.
pub fn all_sorted_sets(alphabet: u32, max_len: usize) -> Vec<Vec<u32>> {
    (0u32..1 << alphabet)
        .map(|mask| (0..alphabet).filter(|b| mask >> b & 1 == 1).collect::<Vec<u32>>())
        .filter(|s| s.len() <= max_len)
        .collect()
}

/// Values whose sums depend on association order.
pub fn awkward_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f32> {
    (0..n)
        .map(|_| {
            let mag = [1e-3f32, 1.0, 1e4, 3e7][rng.gen_range(0..4)];
            rng.gen_range(-1.0f32..1.0) * mag
        })
        .collect()
}

pub fn random_keys(rng: &mut ChaCha8Rng, len: usize, range: u32) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(0..range)).collect()
}

pub fn random_sorted(rng: &mut ChaCha8Rng, len: usize, range: u32) -> Vec<u32> {
    let mut v: Vec<u32> = rand::seq::index::sample(rng, range as usize, len.min(range as usize))
        .into_iter()
        .map(|x| x as u32)
        .collect();
    v.sort_unstable();
    v
}

pub fn bits(v: &[f32]) -> Vec<u32> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Mixed corpus: random, banded, skewed, matrices with empty rows, a dense
/// row, and single-column shapes.
pub fn corpus(n: usize) -> Vec<(String, CsrMatrix, CsrMatrix)> {
    let mut r = rng(77);
    let mut out = Vec::new();
    for k in 0..n {
        let seed = r.gen();
        let size = r.gen_range(1..=128);
        let (name, a, b) = match k % 6 {
            0 => {
                let d = r.gen_range(0.0..0.3);
                (format!("random {size} {d:.3}"), gen_random(size, size, d, seed), gen_random(size, size, d, seed + 1))
            }
            1 => {
                let hw = r.gen_range(0..6);
                let m = gen_banded(size, size, hw, seed);
                (format!("banded {size} hw{hw}"), m.clone(), m)
            }
            2 => {
                let heavy = r.gen_range(0..=size.min(4));
                let hn = r.gen_range(0..=size.min(38));
                let m = gen_skewed(size, size, heavy, hn, size.min(1), seed);
                (format!("skewed {size} {heavy}x{hn}"), m.clone(), m)
            }
            3 => {
                // Half the rows empty.
                let m = gen_random(size, size, 0.2, seed);
                let rows = (0..size)
                    .map(|i| {
                        let (c, v) = m.row(i);
                        if i % 2 == 0 { vec![] } else { c.iter().copied().zip(v.iter().copied()).collect() }
                    })
                    .collect();
                let m = CsrMatrix::from_rows(size, size, rows).unwrap();
                (format!("empty rows {size}"), m.clone(), gen_random(size, size, 0.2, seed + 2))
            }
            4 => {
                // One fully dense row in A.
                let mut rows: Vec<Vec<(u32, f32)>> = vec![Vec::new(); size];
                rows[size / 2] = (0..size as u32).map(|c| (c, r.gen_range(-1.0..1.0))).collect();
                let a = CsrMatrix::from_rows(size, size, rows).unwrap();
                (format!("dense row {size}"), a, gen_random(size, size, 0.3, seed))
            }
            _ => {
                let a = gen_random(size, 1, 0.3, seed);
                let b = gen_random(1, size, 0.3, seed + 3);
                (format!("single column {size}"), a, b)
            }
        };
        out.push((name, a, b));
    }
    out
}

/// Input for one register row of a pair instruction.
#[derive(Debug, Clone)]
pub struct RowCase {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub va: Vec<f32>,
    pub vb: Vec<f32>,
}

impl RowCase {
    pub fn new(rng: &mut ChaCha8Rng, a: Vec<u32>, b: Vec<u32>) -> Self {
        let va = awkward_values(rng, a.len());
        let vb = awkward_values(rng, b.len());
        RowCase { a, b, va, vb }
    }
}

/// Expected register contents for one row: first/second keys and values,
/// input and output counters.
struct Expected {
    first: Vec<(u32, f32)>,
    second: Vec<(u32, f32)>,
    ic: [usize; 2],
    oc: [usize; 2],
}

fn expected(r: usize, kind: PlanKind, c: &RowCase) -> Expected {
    let pairs = |k: &[u32], v: &[f32]| k.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
    let ca = KeyValueChunk::from_pairs(r, &pairs(&c.a, &c.va)).unwrap();
    let cb = KeyValueChunk::from_pairs(r, &pairs(&c.b, &c.vb)).unwrap();
    match kind {
        PlanKind::Sort => {
            let first = chunk_sort_oracle_ordered(&ca, AccumOrder::Descending).pairs();
            let second = chunk_sort_oracle_ordered(&cb, AccumOrder::Ascending).pairs();
            let oc = [first.len(), second.len()];
            Expected { first, second, ic: [c.a.len(), c.b.len()], oc }
        }
        PlanKind::Zip => {
            let m = chunk_merge_oracle(&ca, &cb).unwrap();
            let split = m.merged.len().min(r);
            let (first, second) = (m.merged[..split].to_vec(), m.merged[split..].to_vec());
            let oc = [first.len(), second.len()];
            Expected { first, second, ic: [m.consumed_a, m.consumed_b], oc }
        }
    }
}

fn junk(rng: &mut ChaCha8Rng) -> u32 {
    match rng.gen_range(0..3) {
        0 => SENTINEL,
        1 => rng.gen_range(0..4),
        _ => rng.gen(),
    }
}

/// Runs the key and value instruction of `kind` on up to `r` row cases
/// (tails of every register row poisoned with junk) and compares keys,
/// values and all four counters with the stream oracles.
pub fn check_isa_batch(rng: &mut ChaCha8Rng, r: usize, kind: PlanKind, cases: &[RowCase]) -> Result<(), String> {
    assert!(cases.len() <= r);
    let mut s = MachineState::new(r, 0);
    for t in 0..4 {
        for row in 0..r {
            for lane in s.tr[t].row_mut(row) {
                *lane = junk(rng);
            }
        }
    }
    let (mut la, mut lb) = (vec![0u32; r], vec![0u32; r]);
    for (row, c) in cases.iter().enumerate() {
        s.tr[0].row_mut(row)[..c.a.len()].copy_from_slice(&c.a);
        s.tr[2].row_mut(row)[..c.b.len()].copy_from_slice(&c.b);
        for (dst, v) in s.tr[1].row_mut(row).iter_mut().zip(&c.va) {
            *dst = v.to_bits();
        }
        for (dst, v) in s.tr[3].row_mut(row).iter_mut().zip(&c.vb) {
            *dst = v.to_bits();
        }
        la[row] = c.a.len() as u32;
        lb[row] = c.b.len() as u32;
    }
    s.set_vector(0, &la);
    s.set_vector(1, &lb);
    let (k1, k2, v1, v2, l1, l2) = (MReg(0), MReg(2), MReg(1), MReg(3), VReg(0), VReg(1));
    let run = match kind {
        PlanKind::Sort => exec_mssortk(&mut s, k1, k2, l1, l2).and_then(|()| exec_mssortv(&mut s, v1, v2, l1, l2)),
        PlanKind::Zip => exec_mszipk(&mut s, k1, k2, l1, l2).and_then(|()| exec_mszipv(&mut s, v1, v2, l1, l2)),
    };
    run.map_err(|e| format!("{kind:?} failed: {e}"))?;
    let empty = RowCase { a: vec![], b: vec![], va: vec![], vb: vec![] };
    for row in 0..r {
        let c = cases.get(row).unwrap_or(&empty);
        let e = expected(r, kind, c);
        let ctx = || format!("{kind:?} R={r} row {row} a={:?} b={:?}", c.a, c.b);
        let got_ic = [s.ic[0].get(row), s.ic[1].get(row)];
        let got_oc = [s.oc[0].get(row), s.oc[1].get(row)];
        if got_ic != e.ic || got_oc != e.oc {
            return Err(format!("{}: counters ic={got_ic:?} oc={got_oc:?}, expected ic={:?} oc={:?}", ctx(), e.ic, e.oc));
        }
        for (kt, vt, want) in [(0, 1, &e.first), (2, 3, &e.second)] {
            let keys = s.tr[kt].row(row);
            let vals = s.tr[vt].row(row);
            let got: Vec<(u32, u32)> = keys[..want.len()].iter().copied().zip(vals[..want.len()].iter().copied()).collect();
            let exp: Vec<(u32, u32)> = want.iter().map(|&(k, v)| (k, v.to_bits())).collect();
            if got != exp {
                return Err(format!("{}: tr{kt}/tr{vt} got {got:?}, expected {exp:?}", ctx()));
            }
            if keys[want.len()..].iter().any(|&k| k != SENTINEL) {
                return Err(format!("{}: tr{kt} tail not padded: {keys:?}", ctx()));
            }
        }
    }
    Ok(())
}

/// Every sort and zip case over keys `{0, 1, 2}` for one array size.
/// Returns the number of row cases checked.
pub fn isa_exhaustive(r: usize) -> Result<usize, String> {
    let mut rng = rng(r as u64);
    let mut total = 0;
    for (kind, seqs) in [(PlanKind::Sort, all_sequences(3, r)), (PlanKind::Zip, all_sorted_sets(3, r))] {
        let mut cases = Vec::new();
        for a in &seqs {
            for b in &seqs {
                cases.push(RowCase::new(&mut rng, a.clone(), b.clone()));
            }
        }
        total += cases.len();
        for batch in cases.chunks(r) {
            check_isa_batch(&mut rng, r, kind, batch)?;
        }
    }
    Ok(total)
}

/// `n` random row cases of each kind at array size `r`.
pub fn isa_random(seed: u64, r: usize, n: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    for kind in [PlanKind::Sort, PlanKind::Zip] {
        let mut cases = Vec::with_capacity(n);
        for _ in 0..n {
            let (la, lb) = (rng.gen_range(0..=r), rng.gen_range(0..=r));
            let range = rng.gen_range(1..3 * r as u32);
            let (a, b) = match kind {
                PlanKind::Sort => (random_keys(&mut rng, la, range), random_keys(&mut rng, lb, range)),
                PlanKind::Zip => (random_sorted(&mut rng, la, range), random_sorted(&mut rng, lb, range)),
            };
            cases.push(RowCase::new(&mut rng, a, b));
        }
        for batch in cases.chunks(r) {
            check_isa_batch(&mut rng, r, kind, batch)?;
        }
    }
    Ok(())
}

/// Memory map for the program fidelity checks: each row owns a `4R`-word
/// input region and a `2R`-word output region.
fn program_setup(rng: &mut ChaCha8Rng, r: usize) -> (MachineState, Bases) {
    let in_words = 4 * r * r;
    let out_words = 2 * r * r;
    let bases = Bases {
        keys_in: 0,
        vals_in: 4 * in_words as u64,
        keys_out: 8 * in_words as u64,
        vals_out: (8 * in_words + 4 * out_words) as u64,
    };
    let bytes = 8 * in_words + 8 * out_words;
    let mut s = MachineState::new(r, bytes);
    let noise: Vec<u32> = (0..bytes / 4).map(|_| junk(rng)).collect();
    s.mem.write_words(0, &noise).unwrap();
    (s, bases)
}

fn first_difference(s: &MachineState, expected: &spz_core::arch::Memory) -> Option<usize> {
    let n = s.mem.size() / 4;
    let got = s.mem.read_words(0, n).unwrap();
    let want = expected.read_words(0, n).unwrap();
    got.iter().zip(&want).position(|(g, w)| g != w).map(|w| 4 * w)
}

fn write_pairs(mem: &mut spz_core::arch::Memory, keys_base: u64, vals_base: u64, off: usize, p: &[(u32, f32)]) {
    let keys: Vec<u32> = p.iter().map(|x| x.0).collect();
    let vals: Vec<f32> = p.iter().map(|x| x.1).collect();
    mem.write_words(keys_base + 4 * off as u64, &keys).unwrap();
    mem.write_f32(vals_base + 4 * off as u64, &vals).unwrap();
}

/// Runs the chunk sort program over random in-memory streams and compares
/// the whole memory image and the output lengths with the oracle.
#[allow(clippy::needless_range_loop)]
pub fn check_sort_program(rng: &mut ChaCha8Rng, r: usize) -> Result<(), String> {
    let (mut s, b) = program_setup(rng, r);
    let mut expected = s.mem.clone();
    let mut v = vec![vec![0u32; r]; 8];
    let mut want_lens = (vec![0u32; r], vec![0u32; r]);
    for row in 0..r {
        let (la, lb) = (rng.gen_range(0..=r), rng.gen_range(0..=r));
        let o1 = row * 4 * r + rng.gen_range(0..=r);
        let o2 = row * 4 * r + 2 * r + rng.gen_range(0..=r);
        let range = rng.gen_range(1..3 * r as u32);
        let (ka, kb) = (random_keys(rng, la, range), random_keys(rng, lb, range));
        let (va, vb) = (awkward_values(rng, la), awkward_values(rng, lb));
        let pa: Vec<(u32, f32)> = ka.into_iter().zip(va).collect();
        let pb: Vec<(u32, f32)> = kb.into_iter().zip(vb).collect();
        write_pairs(&mut s.mem, b.keys_in, b.vals_in, o1, &pa);
        write_pairs(&mut expected, b.keys_in, b.vals_in, o1, &pa);
        write_pairs(&mut s.mem, b.keys_in, b.vals_in, o2, &pb);
        write_pairs(&mut expected, b.keys_in, b.vals_in, o2, &pb);
        let out1 = row * 2 * r;
        let out2 = out1 + r;
        let sa = chunk_sort_oracle_ordered(&KeyValueChunk::from_pairs(r, &pa).unwrap(), AccumOrder::Descending);
        let sb = chunk_sort_oracle_ordered(&KeyValueChunk::from_pairs(r, &pb).unwrap(), AccumOrder::Ascending);
        write_pairs(&mut expected, b.keys_out, b.vals_out, out1, &sa.pairs());
        write_pairs(&mut expected, b.keys_out, b.vals_out, out2, &sb.pairs());
        for (reg, val) in [(0, la), (1, lb), (2, o1), (3, o2), (6, out1), (7, out2)] {
            v[reg][row] = val as u32;
        }
        want_lens.0[row] = sa.len() as u32;
        want_lens.1[row] = sb.len() as u32;
    }
    for reg in [0, 1, 2, 3, 6, 7] {
        s.set_vector(reg, &v[reg]);
    }
    run_program(&mut s, &sort_chunks(&b)).map_err(|e| e.to_string())?;
    if let Some(addr) = first_difference(&s, &expected) {
        return Err(format!("sort program R={r}: memory differs at byte {addr:#x}"));
    }
    if s.v[4].lanes != want_lens.0 || s.v[5].lanes != want_lens.1 {
        return Err(format!("sort program R={r}: output lengths {:?}/{:?}", s.v[4].lanes, s.v[5].lanes));
    }
    Ok(())
}

/// Runs one step of the chunk merge program over random sorted streams and
/// compares the memory image, consumed counts and the output pointer.
#[allow(clippy::needless_range_loop)]
pub fn check_merge_program(rng: &mut ChaCha8Rng, r: usize) -> Result<(), String> {
    let (mut s, b) = program_setup(rng, r);
    let mut expected = s.mem.clone();
    let mut v = vec![vec![0u32; r]; 10];
    let mut want = vec![vec![0u32; r]; 10];
    for row in 0..r {
        let range = rng.gen_range(1..4 * r as u32);
        let (la, lb) = (rng.gen_range(0..=r), rng.gen_range(0..=r));
        let ka = random_sorted(rng, la, range);
        let kb = random_sorted(rng, lb, range);
        let (va, vb) = (awkward_values(rng, ka.len()), awkward_values(rng, kb.len()));
        let pa: Vec<(u32, f32)> = ka.into_iter().zip(va).collect();
        let pb: Vec<(u32, f32)> = kb.into_iter().zip(vb).collect();
        let o1 = row * 4 * r + rng.gen_range(0..=r);
        let o2 = row * 4 * r + 2 * r + rng.gen_range(0..=r);
        for mem in [&mut s.mem, &mut expected] {
            write_pairs(mem, b.keys_in, b.vals_in, o1, &pa);
            write_pairs(mem, b.keys_in, b.vals_in, o2, &pb);
        }
        let out = row * 2 * r;
        let m = chunk_merge_oracle(
            &KeyValueChunk::from_pairs(r, &pa).unwrap(),
            &KeyValueChunk::from_pairs(r, &pb).unwrap(),
        )
        .unwrap();
        write_pairs(&mut expected, b.keys_out, b.vals_out, out, &m.merged);
        for (reg, val) in [(0, pa.len()), (1, pb.len()), (2, o1), (3, o2), (5, out)] {
            v[reg][row] = val as u32;
        }
        let first = m.merged.len().min(r);
        for (reg, val) in [(5, out + m.merged.len()), (6, m.consumed_a), (7, m.consumed_b), (8, first), (9, m.merged.len() - first)] {
            want[reg][row] = val as u32;
        }
    }
    for reg in [0, 1, 2, 3, 5] {
        s.set_vector(reg, &v[reg]);
    }
    run_program(&mut s, &merge_chunks(&b)).map_err(|e| e.to_string())?;
    if let Some(addr) = first_difference(&s, &expected) {
        return Err(format!("merge program R={r}: memory differs at byte {addr:#x}"));
    }
    for reg in 5..10 {
        if s.v[reg].lanes != want[reg] {
            return Err(format!("merge program R={r}: v{reg} = {:?}, expected {:?}", s.v[reg].lanes, want[reg]));
        }
    }
    Ok(())
}

/// Compares `actual` with the golden file, or rewrites the file when
/// `SPZ_BLESS=1`.
pub fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var("SPZ_BLESS").is_ok_and(|v| v == "1") {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want != actual {
        let line = want.lines().zip(actual.lines()).position(|(a, b)| a != b).unwrap_or(want.lines().count().min(actual.lines().count()));
        return Err(format!("{} differs from the trace at line {}", path.display(), line + 1));
    }
    Ok(())
}
