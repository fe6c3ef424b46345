//! Deterministic pairwise summation.
//!
//! Every modular, integral and inner product in the crate is reduced through
//! these helpers so that results only depend on the input order, never on
//! thread scheduling.

const BLOCK: usize = 8;

/// Pairwise sum of `f(0) + ... + f(n - 1)`.
///
/// The reduction tree splits `[0, n)` at `n / 2` recursively and sums blocks
/// of at most 8 terms left to right.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        let len = hi - lo;
        if len <= BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        } else {
            let mid = lo + len / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, n, &f)
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_sum_by(xs.len(), |i| xs[i])
}
