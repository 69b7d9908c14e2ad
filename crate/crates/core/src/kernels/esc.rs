use std::time::{Duration, Instant};

use serde::Serialize;

use super::{KernelError, KernelResult};
use crate::counters::{OpCounters, Phase};
use crate::matrix::{check_dims, CsrMatrix};

const DIGIT_BITS: u32 = 8;
const PASSES: u32 = 64 / DIGIT_BITS;

/// Stable LSD radix sort of `(key, value)` triples on 8-bit digits. A pass
/// whose digit is the same for every element is skipped. Returns
/// `(passes run, elements moved)`.
fn radix_sort(items: &mut Vec<(u64, f32)>, scratch: &mut Vec<(u64, f32)>) -> (u64, u64) {
    let (mut passes, mut moves) = (0, 0);
    if items.len() < 2 {
        return (0, 0);
    }
    for p in 0..PASSES {
        let shift = p * DIGIT_BITS;
        let digit = |k: u64| ((k >> shift) & 0xff) as usize;
        let mut count = [0usize; 256];
        for &(k, _) in items.iter() {
            count[digit(k)] += 1;
        }
        if count.contains(&items.len()) {
            continue;
        }
        let mut start = [0usize; 256];
        for d in 1..256 {
            start[d] = start[d - 1] + count[d - 1];
        }
        scratch.clear();
        scratch.resize(items.len(), (0, 0.0));
        for &it in items.iter() {
            let d = digit(it.0);
            scratch[start[d]] = it;
            start[d] += 1;
        }
        std::mem::swap(items, scratch);
        passes += 1;
        moves += items.len() as u64;
    }
    (passes, moves)
}

/// Expand-sort-compress over blocks of `block_rows` rows: products are
/// expanded into `(row << 32 | col, value)` triples, radix sorted and
/// adjacent duplicates are summed.
pub fn spgemm_esc(a: &CsrMatrix, b: &CsrMatrix, block_rows: usize) -> Result<KernelResult, KernelError> {
    if block_rows == 0 {
        return Err(KernelError::BadBlockSize);
    }
    check_dims(a, b)?;
    let mut counters = OpCounters::default();
    let mut rows: Vec<Vec<(u32, f32)>> = vec![Vec::new(); a.rows()];
    let (mut items, mut scratch) = (Vec::new(), Vec::new());
    let (mut t_exp, mut t_sort, mut t_out) = (Duration::ZERO, Duration::ZERO, Duration::ZERO);
    let (mut passes, mut moves) = (0, 0);
    for start in (0..a.rows()).step_by(block_rows) {
        let end = (start + block_rows).min(a.rows());
        let t0 = Instant::now();
        items.clear();
        for i in start..end {
            let local = ((i - start) as u64) << 32;
            let (acols, avals) = a.row(i);
            for (&j, &av) in acols.iter().zip(avals) {
                let (bcols, bvals) = b.row(j as usize);
                items.extend(bcols.iter().zip(bvals).map(|(&k, &bv)| (local | k as u64, av * bv)));
            }
        }
        counters.multiplies += items.len() as u64;
        let t1 = Instant::now();
        let (p, m) = radix_sort(&mut items, &mut scratch);
        passes += p;
        moves += m;
        let t2 = Instant::now();
        let mut idx = 0;
        while idx < items.len() {
            let (key, mut v) = items[idx];
            idx += 1;
            while idx < items.len() && items[idx].0 == key {
                v += items[idx].1;
                idx += 1;
            }
            rows[start + (key >> 32) as usize].push((key as u32, v));
        }
        t_exp += t1 - t0;
        t_sort += t2 - t1;
        t_out += t2.elapsed();
    }
    counters.bump("esc_triples", counters.multiplies);
    counters.bump("radix_passes", passes);
    counters.bump("radix_moves", moves);
    counters.phase(Phase::Expansion, t_exp, counters.multiplies);
    counters.phase(Phase::Sorting, t_sort, moves);
    let t = Instant::now();
    let c = CsrMatrix::from_rows(a.rows(), b.cols(), rows)?;
    counters.phase(Phase::Output, t_out + t.elapsed(), c.nnz() as u64);
    Ok(KernelResult { c, counters })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSweep {
    /// `(block_rows, counters)` for every size tried, in input order.
    pub runs: Vec<(usize, OpCounters)>,
    /// Block size with the fewest radix moves (smallest size on ties).
    pub best: usize,
}

/// Runs ESC once per block size and picks the cheapest by radix moves.
/// Returns the sweep and the product from the best run.
pub fn esc_block_sweep(a: &CsrMatrix, b: &CsrMatrix, sizes: &[usize]) -> Result<(BlockSweep, KernelResult), KernelError> {
    let mut best: Option<(u64, usize, KernelResult)> = None;
    let mut runs = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let res = spgemm_esc(a, b, s)?;
        let moves = res.counters.extra("radix_moves");
        runs.push((s, res.counters.clone()));
        if best.as_ref().is_none_or(|(m, bs, _)| moves < *m || (moves == *m && s < *bs)) {
            best = Some((moves, s, res));
        }
    }
    let (_, s, res) = best.ok_or(KernelError::BadBlockSize)?;
    Ok((BlockSweep { runs, best: s }, res))
}
