use std::fmt;

use serde::{Deserialize, Serialize};

use super::{run_kernel, Algorithm, KernelConfig, KernelError, KernelResult};
use crate::matrix::{reference_spgemm_with, CsrMatrix};
use crate::par::{map_slice, Execution};

/// Value agreement bound: `|got - want| <= rel * |want|`, or `<= abs` for
/// results that cancel to near zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-5, abs: 1e-6 }
    }
}

pub fn values_close(got: f32, want: f32, tol: Tolerance) -> bool {
    let (g, w) = (got as f64, want as f64);
    let diff = (g - w).abs();
    diff <= tol.rel * w.abs() || diff <= tol.abs
}

/// First coordinate where a product disagrees with the reference. A
/// missing or extra entry has `None` on the side that lacks it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub row: usize,
    pub col: u32,
    pub expected: Option<f32>,
    pub got: Option<f32>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f32>| v.map_or("no entry".to_string(), |x| format!("{x:e}"));
        write!(f, "({}, {}): expected {}, got {}", self.row, self.col, show(self.expected), show(self.got))
    }
}

/// Checks exact pattern equality and value agreement with `reference`.
pub fn check_against(c: &CsrMatrix, reference: &CsrMatrix, tol: Tolerance) -> Result<(), Divergence> {
    if (c.rows(), c.cols()) != (reference.rows(), reference.cols()) {
        return Err(Divergence { row: c.rows().min(reference.rows()), col: 0, expected: None, got: None });
    }
    for i in 0..c.rows() {
        let (gc, gv) = c.row(i);
        let (wc, wv) = reference.row(i);
        let (mut p, mut q) = (0, 0);
        while p < gc.len() || q < wc.len() {
            let g = gc.get(p).copied().unwrap_or(u32::MAX);
            let w = wc.get(q).copied().unwrap_or(u32::MAX);
            if g < w {
                return Err(Divergence { row: i, col: g, expected: None, got: Some(gv[p]) });
            }
            if w < g {
                return Err(Divergence { row: i, col: w, expected: Some(wv[q]), got: None });
            }
            if !values_close(gv[p], wv[q], tol) {
                return Err(Divergence { row: i, col: g, expected: Some(wv[q]), got: Some(gv[p]) });
            }
            p += 1;
            q += 1;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelRun {
    pub algorithm: Algorithm,
    pub result: KernelResult,
    pub verdict: Result<(), Divergence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub reference: CsrMatrix,
    pub runs: Vec<KernelRun>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.runs.iter().all(|r| r.verdict.is_ok())
    }

    /// The first failing kernel and its divergence.
    pub fn first_failure(&self) -> Option<(Algorithm, Divergence)> {
        self.runs.iter().find_map(|r| r.verdict.err().map(|d| (r.algorithm, d)))
    }
}

/// Runs each kernel (in parallel when `exec` allows, each with its own
/// machine state) and checks every product against the reference.
pub fn compare_kernels(
    a: &CsrMatrix,
    b: &CsrMatrix,
    algorithms: &[Algorithm],
    cfg: &KernelConfig,
    tol: Tolerance,
    exec: Execution,
) -> Result<CompareReport, KernelError> {
    let reference = reference_spgemm_with(a, b, exec)?;
    let results = map_slice(algorithms, exec, |&algo| run_kernel(algo, a, b, cfg));
    let mut runs = Vec::with_capacity(algorithms.len());
    for (&algorithm, result) in algorithms.iter().zip(results) {
        let result = result?;
        let verdict = check_against(&result.c, &reference, tol);
        runs.push(KernelRun { algorithm, result, verdict });
    }
    Ok(CompareReport { reference, runs })
}
