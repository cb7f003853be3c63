//! Deterministic floating-point reductions.
//!
//! Every sum in this crate that feeds a reported number goes through a
//! fixed-topology pairwise tree so results are bit-identical from run to run
//! and independent of the rayon thread count. Parallel loops produce one
//! partial per logical row (indexed collection), never a racing accumulator.

use rayon::prelude::*;

/// Pairwise (tree) sum with a topology fixed by the input length.
pub fn tree_sum(mut terms: Vec<f64>) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let mut len = terms.len();
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            terms[i] = terms[2 * i] + terms[2 * i + 1];
        }
        if len % 2 == 1 {
            terms[half] = terms[len - 1];
            len = half + 1;
        } else {
            len = half;
        }
    }
    terms[0]
}

/// Sum `row(i)` over `i in 0..n`, rows evaluated in parallel, combined by a
/// tree whose shape depends only on `n`.
pub fn par_tree_sum<F>(n: usize, row: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partials: Vec<f64> = (0..n).into_par_iter().map(row).collect();
    tree_sum(partials)
}
