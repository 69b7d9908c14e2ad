use serde::{Deserialize, Serialize};

use super::{CooMatrix, MatrixError};
use crate::SENTINEL;

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f32>,
}

pub(crate) fn check_cols(cols: usize) -> Result<(), MatrixError> {
    if cols as u64 >= SENTINEL as u64 {
        return Err(MatrixError::UnsupportedDimension { cols });
    }
    Ok(())
}

impl CsrMatrix {
    /// Builds a matrix from raw arrays, validating every invariant.
    pub fn new(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<f32>,
    ) -> Result<Self, MatrixError> {
        check_cols(cols)?;
        let bad = |m: String| Err(MatrixError::InvalidCsr(m));
        if row_ptr.len() != rows + 1 {
            return bad(format!("row_ptr has {} entries, expected {}", row_ptr.len(), rows + 1));
        }
        if row_ptr[0] != 0 {
            return bad("row_ptr[0] != 0".into());
        }
        if col_idx.len() != values.len() || row_ptr[rows] != col_idx.len() {
            return bad(format!(
                "nnz disagreement: row_ptr end {}, {} indices, {} values",
                row_ptr[rows],
                col_idx.len(),
                values.len()
            ));
        }
        for i in 0..rows {
            let (s, e) = (row_ptr[i], row_ptr[i + 1]);
            if s > e {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            let cs = &col_idx[s..e];
            if cs.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {i} columns not strictly ascending"));
            }
            if let Some(&c) = cs.last() {
                if c as usize >= cols {
                    return bad(format!("row {i} has column {c} >= {cols}"));
                }
            }
        }
        Ok(CsrMatrix { rows, cols, row_ptr, col_idx, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix { rows, cols, row_ptr: vec![0; rows + 1], col_idx: vec![], values: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds from per-row entry lists. Each list must already be sorted and
    /// unique by column.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Vec<(u32, f32)>>) -> Result<Self, MatrixError> {
        if data.len() != rows {
            return Err(MatrixError::InvalidCsr(format!("{} row lists for {rows} rows", data.len())));
        }
        let nnz = data.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in data {
            for (c, v) in row {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self::new(rows, cols, row_ptr, col_idx, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f32]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: u32) -> Option<f32> {
        let (cs, vs) = self.row(i);
        cs.binary_search(&j).ok().map(|k| vs[k])
    }

    pub fn to_coo(&self) -> CooMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            let (cs, vs) = self.row(i);
            entries.extend(cs.iter().zip(vs).map(|(&c, &v)| (i, c as usize, v)));
        }
        CooMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows, "permutation length");
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for &p in perm {
            let (cs, vs) = self.row(p);
            col_idx.extend_from_slice(cs);
            values.extend_from_slice(vs);
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { rows: self.rows, cols: self.cols, row_ptr, col_idx, values }
    }

    /// Same sparsity pattern (shape and column indices).
    pub fn same_pattern(&self, other: &CsrMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }
}
