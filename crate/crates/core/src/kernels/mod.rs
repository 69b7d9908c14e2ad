//! Row-wise SpGEMM kernels.
//!
//! The scalar kernels ([`spgemm_scl_array`], [`spgemm_scl_hash`]) and the
//! expand-sort-compress kernel ([`spgemm_esc`]) run on the host. The merge
//! kernels ([`spgemm_spz`], [`spgemm_spz_rsort`]) drive a [`MachineState`]
//! through the chunk sort and merge programs. Every kernel accumulates in
//! f32 and reports an [`OpCounters`].

mod compare;
mod esc;
mod scalar;
mod spz;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{MachineState, MemoryFault};
use crate::counters::OpCounters;
use crate::isa::ProgramError;
use crate::matrix::{CsrMatrix, MatrixError};

pub use compare::{check_against, compare_kernels, values_close, CompareReport, Divergence, Tolerance};
pub use esc::{esc_block_sweep, spgemm_esc, BlockSweep};
pub use scalar::{spgemm_scl_array, spgemm_scl_hash};
pub use spz::{spgemm_spz, spgemm_spz_rsort, spgemm_spz_with, RowOrder, SpzConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelResult {
    pub c: CsrMatrix,
    pub counters: OpCounters,
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("machine has R = {machine}, kernel configured for R = {expected}")]
    RMismatch { machine: usize, expected: usize },
    #[error("block size must be at least 1")]
    BadBlockSize,
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Memory(#[from] MemoryFault),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    SclArray,
    SclHash,
    Esc,
    Spz,
    SpzRsort,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::SclArray, Algorithm::SclHash, Algorithm::Esc, Algorithm::Spz, Algorithm::SpzRsort];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SclArray => "scl-array",
            Algorithm::SclHash => "scl-hash",
            Algorithm::Esc => "esc",
            Algorithm::Spz => "spz",
            Algorithm::SpzRsort => "spz-rsort",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}' (expected one of scl-array, scl-hash, esc, spz, spz-rsort)"))
    }
}

/// Settings shared by every kernel run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Array dimension for the merge kernels.
    pub r: usize,
    /// Rows per block for ESC.
    pub esc_block_rows: usize,
    /// Group order used by spz-rsort.
    pub rsort_order: RowOrder,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { r: crate::DEFAULT_R, esc_block_rows: 64, rsort_order: RowOrder::DescendingWork }
    }
}

/// Runs one kernel with its own machine state where needed.
pub fn run_kernel(algo: Algorithm, a: &CsrMatrix, b: &CsrMatrix, cfg: &KernelConfig) -> Result<KernelResult, KernelError> {
    match algo {
        Algorithm::SclArray => Ok(spgemm_scl_array(a, b)?),
        Algorithm::SclHash => Ok(spgemm_scl_hash(a, b)?),
        Algorithm::Esc => spgemm_esc(a, b, cfg.esc_block_rows),
        Algorithm::Spz | Algorithm::SpzRsort => {
            let mut m = MachineState::new(cfg.r, 0);
            let order = if algo == Algorithm::Spz { RowOrder::Natural } else { cfg.rsort_order };
            spgemm_spz_with(a, b, &mut m, &SpzConfig { r: cfg.r, order })
        }
    }
}
