use serde::{Deserialize, Serialize};

use super::reference::{check_dims, reference_spgemm_with};
use super::{CsrMatrix, MatrixError};
use crate::par::{map_indexed, Execution};

/// Dataset metrics of the product `A x B` (normally `A x A`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub density: f64,
    pub total_work: u64,
    pub avg_work_per_row: f64,
    pub out_nnz: usize,
    pub avg_out_nnz_per_row: f64,
    pub group_size: usize,
    pub avg_work_per_group: f64,
    pub work_variation: f64,
}

/// Multiplications needed for each output row of `A x B`.
pub fn row_work(a: &CsrMatrix, b: &CsrMatrix) -> Vec<u64> {
    (0..a.rows())
        .map(|i| a.row(i).0.iter().map(|&j| b.row_nnz(j as usize) as u64).sum())
        .collect()
}

/// Coefficient of variation (population std / mean) of each block of
/// `group_size` consecutive entries, averaged over blocks. A trailing partial
/// block counts as a block; blocks with zero mean contribute 0.
pub fn work_variation(work: &[u64], group_size: usize) -> f64 {
    assert!(group_size > 0, "group size must be positive");
    if work.is_empty() {
        return 0.0;
    }
    let cvs: Vec<f64> = work
        .chunks(group_size)
        .map(|g| {
            let n = g.len() as f64;
            let mean = g.iter().sum::<u64>() as f64 / n;
            if mean == 0.0 {
                return 0.0;
            }
            let var = g.iter().map(|&w| (w as f64 - mean).powi(2)).sum::<f64>() / n;
            var.sqrt() / mean
        })
        .collect();
    cvs.iter().sum::<f64>() / cvs.len() as f64
}

pub fn dataset_stats(a: &CsrMatrix, group_size: usize) -> Result<DatasetStats, MatrixError> {
    dataset_stats_pair(a, a, group_size, Execution::default())
}

pub fn dataset_stats_pair(
    a: &CsrMatrix,
    b: &CsrMatrix,
    group_size: usize,
    exec: Execution,
) -> Result<DatasetStats, MatrixError> {
    check_dims(a, b)?;
    if group_size == 0 {
        return Err(MatrixError::DimensionMismatch("group size must be positive".into()));
    }
    let work = row_work(a, b);
    let total_work: u64 = work.iter().sum();
    let c = reference_spgemm_with(a, b, exec)?;
    let rows = a.rows();
    let per_row = |x: f64| if rows == 0 { 0.0 } else { x / rows as f64 };
    let groups = rows.div_ceil(group_size);
    let group_sums = map_indexed(groups, exec, |g| work[g * group_size..((g + 1) * group_size).min(rows)].iter().sum::<u64>());
    let cells = rows as f64 * a.cols() as f64;
    Ok(DatasetStats {
        rows,
        cols: a.cols(),
        nnz: a.nnz(),
        density: if cells == 0.0 { 0.0 } else { a.nnz() as f64 / cells },
        total_work,
        avg_work_per_row: per_row(total_work as f64),
        out_nnz: c.nnz(),
        avg_out_nnz_per_row: per_row(c.nnz() as f64),
        group_size,
        avg_work_per_group: if groups == 0 { 0.0 } else { group_sums.iter().sum::<u64>() as f64 / groups as f64 },
        work_variation: work_variation(&work, group_size),
    })
}
