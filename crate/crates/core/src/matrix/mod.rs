//! Sparse matrix storage, I/O, generators, the reference product and
//! dataset statistics.

mod binary;
mod coo;
mod csr;
mod error;
mod gen;
mod market;
mod reference;
mod stats;

pub use binary::{read_binary, write_binary};
pub use coo::CooMatrix;
pub use csr::CsrMatrix;
pub use error::MatrixError;
pub use gen::{gen_banded, gen_random, gen_skewed, GenSpec};
pub use market::{parse_matrix_market, parse_matrix_market_str, read_matrix_market, write_matrix_market};
pub(crate) use reference::check_dims;
pub use reference::{reference_spgemm, reference_spgemm_with};
pub use stats::{dataset_stats, dataset_stats_pair, row_work, work_variation, DatasetStats};

use std::path::Path;

/// Loads a matrix by extension: `.spzb` is the binary cache, anything else
/// is read as Matrix Market.
pub fn load(path: &Path) -> Result<CsrMatrix, MatrixError> {
    if path.extension().is_some_and(|e| e == "spzb") {
        read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
    } else {
        read_matrix_market(path)
    }
}

/// Writes a matrix by extension, mirroring [`load`].
pub fn save(m: &CsrMatrix, path: &Path) -> Result<(), MatrixError> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    if path.extension().is_some_and(|e| e == "spzb") {
        write_binary(m, f)?;
    } else {
        write_matrix_market(m, f)?;
    }
    Ok(())
}
