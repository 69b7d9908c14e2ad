use serde::{Deserialize, Serialize};

use super::csr::check_cols;
use super::{CsrMatrix, MatrixError};

/// Coordinate-list matrix. Entries may be unsorted and repeated until
/// [`CooMatrix::normalize`] is called.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f32)>,
}

impl CooMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        CooMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f32) -> Result<(), MatrixError> {
        if row >= self.rows || col >= self.cols {
            return Err(MatrixError::OutOfBounds { row, col, rows: self.rows, cols: self.cols });
        }
        self.entries.push((row, col, value));
        Ok(())
    }

    /// Sorts entries by (row, col) and sums duplicates. Duplicates are added
    /// in their original order.
    pub fn normalize(&mut self) {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut out: Vec<(usize, usize, f32)> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        self.entries = out;
    }

    pub fn to_csr(&self) -> Result<CsrMatrix, MatrixError> {
        check_cols(self.cols)?;
        let mut norm = self.clone();
        if let Some(&(row, col, _)) = norm.entries.iter().find(|e| e.0 >= self.rows || e.1 >= self.cols) {
            return Err(MatrixError::OutOfBounds { row, col, rows: self.rows, cols: self.cols });
        }
        norm.normalize();
        let mut row_ptr = vec![0usize; self.rows + 1];
        for &(r, _, _) in &norm.entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..self.rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = norm.entries.iter().map(|e| e.1 as u32).collect();
        let values = norm.entries.iter().map(|e| e.2).collect();
        CsrMatrix::new(self.rows, self.cols, row_ptr, col_idx, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_has_zero_row_ptr() {
        let m = CooMatrix::new(2, 2).to_csr().unwrap();
        assert_eq!(m.row_ptr(), &[0, 0, 0]);
    }

    #[test]
    fn rows_are_sorted() {
        let mut c = CooMatrix::new(1, 2);
        c.push(0, 1, 2.0).unwrap();
        c.push(0, 0, 1.0).unwrap();
        let m = c.to_csr().unwrap();
        assert_eq!(m.col_idx(), &[0, 1]);
        assert_eq!(m.values(), &[1.0, 2.0]);
    }

    #[test]
    fn duplicates_are_summed() {
        let mut c = CooMatrix::new(1, 1);
        c.push(0, 0, 1.0).unwrap();
        c.push(0, 0, 2.0).unwrap();
        let m = c.to_csr().unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.values(), &[3.0]);
    }

    #[test]
    fn push_checks_bounds() {
        let mut c = CooMatrix::new(2, 2);
        assert!(c.push(2, 0, 1.0).is_err());
    }
}
