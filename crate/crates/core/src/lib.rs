//! Simulator for a matrix-ISA extension that sorts and merges key-value
//! streams on a systolic array, plus the row-wise SpGEMM pipelines built on
//! top of it.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`]: CSR/COO storage, Matrix Market I/O, generators, the
//!   reference product and dataset statistics.
//! - [`stream`]: key-value chunks and partitions with brute-force sort/merge
//!   oracles.
//! - [`arch`]: machine state (matrix, vector and counter registers, reorder
//!   plan, flat memory).
//! - [`systolic`]: functional and cycle-by-cycle execution of the sort/zip
//!   passes and the pair-level cycle model.
//! - [`isa`]: the eight stream instructions, program execution and the two
//!   canonical chunk programs.
//! - [`kernels`]: scalar array/hash, ESC radix and the two merge-based
//!   kernels, with operation counters and cross-checking.

pub mod arch;
pub mod counters;
pub mod isa;
pub mod kernels;
pub mod matrix;
pub mod par;
pub mod stream;
pub mod systolic;

pub use arch::MachineState;
pub use counters::OpCounters;
pub use matrix::{CooMatrix, CsrMatrix, DatasetStats};
pub use stream::{KeyValueChunk, Partition};

/// Reserved key value. Marks unused chunk lanes and compares greater than
/// every valid column index.
pub const SENTINEL: u32 = u32::MAX;

/// Default array dimension (and register row length): 16x16 PEs, 512-bit
/// vectors of 32-bit elements.
pub const DEFAULT_R: usize = 16;

/// Supported range of array dimensions.
pub const MIN_R: usize = 2;
pub const MAX_R: usize = 64;
