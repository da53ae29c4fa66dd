//! Dense helpers shared by the oracles and solvers.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn symmetric_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    match m.nrows() {
        0 => (0.0, 0.0),
        1 => (m[(0, 0)], m[(0, 0)]),
        2 => {
            let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            (mid - rad, mid + rad)
        }
        _ => {
            let ev = m.clone().symmetric_eigenvalues();
            ev.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
        }
    }
}

/// Principal submatrix `g[idx, idx]` (0-based indices).
pub fn principal_submatrix(g: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| g[(idx[i], idx[j])])
}

/// Columns `idx` of `a` (0-based).
pub fn take_columns(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    a.select_columns(idx)
}

/// Least-squares solve of `a z = b` for a tall full-column-rank `a` via the
/// normal equations. Returns `None` when `aᵀa` is not positive definite.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = a.tr_mul(a);
    let rhs = a.tr_mul(b);
    gram.cholesky().map(|c| c.solve(&rhs))
}

pub fn l1_norm(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th (0-based, lexicographic) `k`-subset of `0..n`.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let block = binomial(n - next - 1, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advance to the next lexicographic `k`-subset of `0..n`. Returns false after
/// the last one.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Fold over every `k`-subset of `0..n` in parallel chunks. `visit` receives
/// the lexicographic rank with each subset; `reduce` must be associative.
pub fn fold_combinations<T, I, V, R>(n: usize, k: usize, identity: I, visit: V, reduce: R) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, u128, &[usize]) + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let total = binomial(n, k);
    if total == 0 {
        return identity();
    }
    let workers = rayon::current_num_threads().max(1) as u128;
    let chunk = (total / (workers * 8)).clamp(256, 1 << 16);
    let chunks = total.div_ceil(chunk);
    (0..chunks as u64)
        .into_par_iter()
        .map(|ci| {
            let start = ci as u128 * chunk;
            let end = (start + chunk).min(total);
            let mut acc = identity();
            let mut comb = unrank_combination(n, k, start);
            let mut rank = start;
            loop {
                visit(&mut acc, rank, &comb);
                rank += 1;
                if rank >= end || !next_combination(&mut comb, n) {
                    break;
                }
            }
            acc
        })
        .reduce(&identity, &reduce)
}
