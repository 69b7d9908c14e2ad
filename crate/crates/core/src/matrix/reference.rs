use std::collections::BTreeMap;

use super::{CsrMatrix, MatrixError};
use crate::par::{map_indexed, Execution};

pub(crate) fn check_dims(a: &CsrMatrix, b: &CsrMatrix) -> Result<(), MatrixError> {
    if a.cols() != b.rows() {
        return Err(MatrixError::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn reference_row(a: &CsrMatrix, b: &CsrMatrix, i: usize) -> Vec<(u32, f32)> {
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    let (acols, avals) = a.row(i);
    for (&j, &av) in acols.iter().zip(avals) {
        let (bcols, bvals) = b.row(j as usize);
        for (&k, &bv) in bcols.iter().zip(bvals) {
            *acc.entry(k).or_insert(0.0) += av as f64 * bv as f64;
        }
    }
    acc.into_iter().map(|(k, v)| (k, v as f32)).collect()
}

/// Oracle product `A x B`: per-row ordered-map accumulation in f64, rounded
/// to f32 at the end. Entries that cancel to zero are kept.
pub fn reference_spgemm(a: &CsrMatrix, b: &CsrMatrix) -> Result<CsrMatrix, MatrixError> {
    reference_spgemm_with(a, b, Execution::default())
}

pub fn reference_spgemm_with(a: &CsrMatrix, b: &CsrMatrix, exec: Execution) -> Result<CsrMatrix, MatrixError> {
    check_dims(a, b)?;
    let rows = map_indexed(a.rows(), exec, |i| reference_row(a, b, i));
    CsrMatrix::from_rows(a.rows(), b.cols(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::gen_random;

    #[allow(clippy::needless_range_loop)]
    fn dense_product(a: &CsrMatrix, b: &CsrMatrix) -> Vec<Vec<Option<f64>>> {
        let mut out = vec![vec![None; b.cols()]; a.rows()];
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let Some(av) = a.get(i, j as u32) else { continue };
                for k in 0..b.cols() {
                    if let Some(bv) = b.get(j, k as u32) {
                        *out[i][k].get_or_insert(0.0) += av as f64 * bv as f64;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn identity_is_neutral() {
        let b = gen_random(3, 5, 0.5, 2);
        assert_eq!(reference_spgemm(&CsrMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn nilpotent_gives_empty() {
        let a = CsrMatrix::from_rows(2, 2, vec![vec![(1, 1.0)], vec![]]).unwrap();
        assert_eq!(reference_spgemm(&a, &a).unwrap().nnz(), 0);
    }

    #[test]
    fn matches_dense_triple_loop() {
        let a = gen_random(16, 16, 0.2, 42);
        let c = reference_spgemm(&a, &a).unwrap();
        let d = dense_product(&a, &a);
        for (i, row) in d.iter().enumerate() {
            let expect: Vec<(u32, f32)> =
                row.iter().enumerate().filter_map(|(k, v)| v.map(|v| (k as u32, v as f32))).collect();
            let (cs, vs) = c.row(i);
            let got: Vec<(u32, f32)> = cs.iter().copied().zip(vs.iter().copied()).collect();
            assert_eq!(got, expect, "row {i}");
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(reference_spgemm(&CsrMatrix::zeros(2, 3), &CsrMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn sequential_equals_parallel() {
        let a = gen_random(50, 50, 0.1, 5);
        let s = reference_spgemm_with(&a, &a, Execution::Sequential).unwrap();
        let p = reference_spgemm_with(&a, &a, Execution::Parallel).unwrap();
        assert_eq!(s, p);
    }
}
