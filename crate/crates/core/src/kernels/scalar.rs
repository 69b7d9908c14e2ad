use std::time::{Duration, Instant};

use super::KernelResult;
use crate::counters::{OpCounters, Phase};
use crate::matrix::{row_work, CsrMatrix, MatrixError};

/// Dense accumulator: values, occupancy flags and the inserted-key list, all
/// sized to `b.cols`. Keys are sorted after each row.
pub fn spgemm_scl_array(a: &CsrMatrix, b: &CsrMatrix) -> Result<KernelResult, MatrixError> {
    crate::matrix::check_dims(a, b)?;
    let mut counters = OpCounters::default();
    let mut vals = vec![0f32; b.cols()];
    let mut occupied = vec![false; b.cols()];
    let mut keys: Vec<u32> = Vec::with_capacity(b.cols());
    let mut rows = Vec::with_capacity(a.rows());
    let (mut t_acc, mut t_sort) = (Duration::ZERO, Duration::ZERO);
    let (mut inserts, mut sorted) = (0u64, 0u64);
    for i in 0..a.rows() {
        let t0 = Instant::now();
        let (acols, avals) = a.row(i);
        for (&j, &av) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(j as usize);
            for (&k, &bv) in bcols.iter().zip(bvals) {
                let k_ = k as usize;
                if occupied[k_] {
                    vals[k_] += av * bv;
                } else {
                    occupied[k_] = true;
                    vals[k_] = av * bv;
                    keys.push(k);
                    inserts += 1;
                }
                counters.multiplies += 1;
            }
        }
        let t1 = Instant::now();
        t_acc += t1 - t0;
        keys.sort_unstable();
        sorted += keys.len() as u64;
        let row: Vec<(u32, f32)> = keys
            .iter()
            .map(|&k| {
                occupied[k as usize] = false;
                (k, vals[k as usize])
            })
            .collect();
        keys.clear();
        rows.push(row);
        t_sort += t1.elapsed();
    }
    counters.bump("spa_inserts", inserts);
    counters.phase(Phase::Expansion, t_acc, counters.multiplies);
    counters.phase(Phase::Sorting, t_sort, sorted);
    let t = Instant::now();
    let c = CsrMatrix::from_rows(a.rows(), b.cols(), rows)?;
    counters.phase(Phase::Output, t.elapsed(), c.nnz() as u64);
    Ok(KernelResult { c, counters })
}

/// Smallest power of two holding `2 * work` slots (at least one slot).
pub(crate) fn hash_table_size(work: u64) -> usize {
    (2 * work).max(1).next_power_of_two() as usize
}

/// Fibonacci hashing of a column index into a table of `1 << bits` slots.
fn hash_slot(key: u32, bits: u32) -> usize {
    if bits == 0 {
        return 0;
    }
    (key.wrapping_mul(0x9E37_79B9) >> (32 - bits)) as usize
}

const EMPTY: u32 = u32::MAX;

/// Open-addressing accumulator with linear probing, sized per row from the
/// row's multiply count. Entries are extracted and sorted after each row.
pub fn spgemm_scl_hash(a: &CsrMatrix, b: &CsrMatrix) -> Result<KernelResult, MatrixError> {
    crate::matrix::check_dims(a, b)?;
    let mut counters = OpCounters::default();
    let t = Instant::now();
    let work = row_work(a, b);
    counters.phase(Phase::Preprocessing, t.elapsed(), a.nnz() as u64);
    let mut table_keys: Vec<u32> = Vec::new();
    let mut table_vals: Vec<f32> = Vec::new();
    let mut rows = Vec::with_capacity(a.rows());
    let (mut t_acc, mut t_sort) = (Duration::ZERO, Duration::ZERO);
    let (mut probes, mut slots, mut sorted) = (0u64, 0u64, 0u64);
    for (i, &w) in work.iter().enumerate() {
        let t0 = Instant::now();
        let size = hash_table_size(w);
        let bits = size.trailing_zeros();
        table_keys.clear();
        table_keys.resize(size, EMPTY);
        table_vals.clear();
        table_vals.resize(size, 0.0);
        slots += size as u64;
        let (acols, avals) = a.row(i);
        for (&j, &av) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(j as usize);
            for (&k, &bv) in bcols.iter().zip(bvals) {
                let mut s = hash_slot(k, bits);
                loop {
                    probes += 1;
                    if table_keys[s] == k {
                        table_vals[s] += av * bv;
                        break;
                    }
                    if table_keys[s] == EMPTY {
                        table_keys[s] = k;
                        table_vals[s] = av * bv;
                        break;
                    }
                    s = (s + 1) & (size - 1);
                }
                counters.multiplies += 1;
            }
        }
        let t1 = Instant::now();
        t_acc += t1 - t0;
        let mut row: Vec<(u32, f32)> = table_keys
            .iter()
            .zip(&table_vals)
            .filter(|(&k, _)| k != EMPTY)
            .map(|(&k, &v)| (k, v))
            .collect();
        row.sort_unstable_by_key(|e| e.0);
        sorted += row.len() as u64;
        rows.push(row);
        t_sort += t1.elapsed();
    }
    counters.bump("hash_probes", probes);
    counters.bump("hash_slots", slots);
    counters.phase(Phase::Expansion, t_acc, counters.multiplies);
    counters.phase(Phase::Sorting, t_sort, sorted);
    let t = Instant::now();
    let c = CsrMatrix::from_rows(a.rows(), b.cols(), rows)?;
    counters.phase(Phase::Output, t.elapsed(), c.nnz() as u64);
    Ok(KernelResult { c, counters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{gen_random, reference_spgemm};

    #[test]
    fn table_sizes() {
        assert_eq!(hash_table_size(0), 1);
        assert_eq!(hash_table_size(1), 2);
        assert_eq!(hash_table_size(3), 8);
        assert_eq!(hash_table_size(4), 8);
    }

    #[test]
    fn identity_left_gives_b() {
        let b = gen_random(12, 9, 0.3, 7);
        let i = CsrMatrix::identity(12);
        assert_eq!(spgemm_scl_array(&i, &b).unwrap().c, b);
        assert_eq!(spgemm_scl_hash(&i, &b).unwrap().c, b);
    }

    #[test]
    fn duplicate_hits_sum_once() {
        // Row 0 of A hits rows 0 and 1 of B, both of which hold column 2.
        let a = CsrMatrix::from_rows(1, 2, vec![vec![(0, 1.0), (1, 2.0)]]).unwrap();
        let b = CsrMatrix::from_rows(2, 3, vec![vec![(2, 3.0)], vec![(0, 1.0), (2, 5.0)]]).unwrap();
        for res in [spgemm_scl_array(&a, &b).unwrap(), spgemm_scl_hash(&a, &b).unwrap()] {
            assert_eq!(res.c.row(0), (&[0u32, 2][..], &[2.0f32, 13.0][..]));
            assert_eq!(res.counters.multiplies, 3);
        }
    }

    #[test]
    fn random_matches_reference_pattern() {
        let a = gen_random(32, 32, 0.1, 11);
        let r = reference_spgemm(&a, &a).unwrap();
        assert!(spgemm_scl_array(&a, &a).unwrap().c.same_pattern(&r));
        assert!(spgemm_scl_hash(&a, &a).unwrap().c.same_pattern(&r));
    }

    #[test]
    fn rejects_mismatch() {
        let z = CsrMatrix::zeros(2, 3);
        assert!(spgemm_scl_array(&z, &z).is_err());
        assert!(spgemm_scl_hash(&z, &z).is_err());
    }
}
