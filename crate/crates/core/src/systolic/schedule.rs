//! First-order occupancy model for one key/value instruction pair.
//!
//! Micro-ops enter back to back. Each makes a sort (or merge) pass and a
//! compress pass of `2n + 1` cycles, with a two-cycle loop-back between
//! them, and the value instruction starts as soon as PE (0, 0) is free. For
//! `1 <= rows <= n` the last value output lands at cycle `4n + 2rows + 1`,
//! so counting cycle 0:
//!
//! ```text
//! T = 2(2n + 1) + 2 * rows
//! ```
//!
//! This agrees with [`super::run_pair`] for every such `(n, rows)`.

/// Cycles the array is occupied by a pair covering `rows` micro-ops.
///
/// # Panics
/// If `rows > n` (a pair never has more micro-ops than register rows).
pub fn schedule_cycles(n: usize, rows: usize) -> u64 {
    assert!(rows <= n, "{rows} micro-ops on a {n}x{n} array");
    if rows == 0 {
        return 0;
    }
    (2 * (2 * n + 1) + 2 * rows) as u64
}

/// Occupancy of a pair whose rows have the given `(la, lb)` lengths. Rows
/// with no input issue no micro-op.
pub fn pair_cycles(n: usize, row_lengths: &[(usize, usize)]) -> u64 {
    schedule_cycles(n, row_lengths.iter().filter(|&&(a, b)| a + b > 0).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_points() {
        assert_eq!(schedule_cycles(3, 1), 16);
        assert_eq!(schedule_cycles(3, 0), 0);
        assert_eq!(schedule_cycles(16, 16), 98);
        assert_eq!(pair_cycles(3, &[(0, 0), (2, 1), (0, 0)]), 16);
    }
}
