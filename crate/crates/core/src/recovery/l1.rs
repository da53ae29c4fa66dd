//! Basis pursuit, `min ‖z‖₁ subject to Φz = y`, by ADMM on the splitting
//! `z = v` with `v` constrained to the affine feasible set.
//!
//! The projection onto `{v : Φv = y}` is exact and uses a Cholesky factor of
//! `ΦΦᵀ`. Every few iterations the support of the current iterate is polished
//! by least squares; when the polished point is feasible and some dual vector
//! `p` with `Φ_Sᵀp = sign(z_S)` satisfies `‖Φᵀp‖∞ ≤ 1`, the point is an exact
//! minimizer and the solver stops.

use std::ops::ControlFlow;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{RecoveryResult, SolverKind, SparseSignal};
use crate::error::{LabError, Result};
use crate::linalg::l1_norm;
use crate::matrices::AsDense;

const RELAXATION: f64 = 1.6;
const DUAL_SLACK: f64 = 1e-10;
const POLISH_FEAS: f64 = 1e-10;
const BALANCE_EVERY: usize = 5;
const BALANCE_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Relative primal residual `‖Φz − y‖ / ‖y‖` required for convergence.
    pub feas_tol: f64,
    /// Largest change of `‖z‖₁` between iterations at convergence.
    pub obj_tol: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty for unit-norm `y`, chosen from the problem size
    /// when unset. The penalty adapts to balance primal and dual residuals.
    pub rho: Option<f64>,
    /// Iterations between support polishing attempts; 0 disables polishing.
    pub polish_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { feas_tol: 1e-6, obj_tol: 1e-8, max_iter: 20_000, rho: None, polish_every: 10 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.feas_tol) || !positive(self.obj_tol) {
            return Err(LabError::Precondition("solver tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(LabError::Precondition("max_iter must be at least 1".into()));
        }
        if let Some(rho) = self.rho {
            if !positive(rho) {
                return Err(LabError::Precondition(format!("rho must be positive, got {rho}")));
            }
        }
        Ok(())
    }
}

/// Snapshot handed to a monitor after every iteration.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub iteration: usize,
    /// `‖v‖₁` of the current feasible iterate, an upper bound on the optimum.
    pub feasible_l1: f64,
}

/// A measurement matrix prepared for repeated solves.
pub struct BasisPursuit {
    a: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl BasisPursuit {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let gram = &a * a.transpose();
        Self::with_row_gram(a, gram)
    }

    /// Uses a precomputed `ΦΦᵀ`, for instance a principal submatrix of the
    /// row Gram matrix of a larger Φ.
    pub fn with_row_gram(a: DMatrix<f64>, gram: DMatrix<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(LabError::InvalidDimension(format!("empty system {}x{}", a.nrows(), a.ncols())));
        }
        if gram.shape() != (a.nrows(), a.nrows()) {
            return Err(LabError::InvalidDimension(format!(
                "row Gram matrix is {:?}, expected {}x{}",
                gram.shape(),
                a.nrows(),
                a.nrows()
            )));
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| LabError::Numeric("rows of the measurement matrix are linearly dependent".into()))?;
        Ok(Self { a, chol })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    fn project(&self, point: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let gap = &self.a * point - y;
        point - self.a.tr_mul(&self.chol.solve(&gap))
    }

    pub fn solve(&self, y: &DVector<f64>, opts: &SolverOptions) -> Result<RecoveryResult> {
        self.solve_monitored(y, opts, |_| ControlFlow::Continue(()))
    }

    /// Like `solve`, but `monitor` may stop the iteration early, in which case
    /// the result is returned unconverged.
    pub fn solve_monitored<F>(&self, y: &DVector<f64>, opts: &SolverOptions, mut monitor: F) -> Result<RecoveryResult>
    where
        F: FnMut(&Progress) -> ControlFlow<()>,
    {
        opts.validate()?;
        let (m, n) = self.a.shape();
        if y.len() != m {
            return Err(LabError::UniverseMismatch { expected: m, got: y.len() });
        }
        let scale = y.norm();
        if !scale.is_finite() {
            return Err(LabError::Numeric("measurements are not finite".into()));
        }
        if scale == 0.0 {
            return Ok(self.finish(DVector::zeros(n), y, 0, true, true));
        }
        let yn = y / scale;
        let mut rho = opts.rho.unwrap_or_else(|| default_rho(m, n));

        let mut v = self.project(&DVector::zeros(n), &yn);
        let mut z = v.clone();
        let mut u = DVector::zeros(n);
        let mut prev_l1 = l1_norm(&z);

        for it in 1..=opts.max_iter {
            v = self.project(&(&z - &u), &yn);
            let relaxed = &v * RELAXATION + &z * (1.0 - RELAXATION);
            let threshold = 1.0 / rho;
            let z_prev = std::mem::replace(&mut z, (&relaxed + &u).map(|t| soft(t, threshold)));
            u += &relaxed - &z;
            if it % BALANCE_EVERY == 0 {
                let primal = (&v - &z).norm();
                let dual = rho * (&z - &z_prev).norm();
                let factor = if primal > BALANCE_RATIO * dual {
                    2.0
                } else if dual > BALANCE_RATIO * primal {
                    0.5
                } else {
                    1.0
                };
                rho *= factor;
                u /= factor;
            }

            let l1 = l1_norm(&z);
            if opts.polish_every > 0 && it % opts.polish_every == 0 {
                if let Some(sol) = self.polish(&z, &yn, &(&u * rho)) {
                    return Ok(self.finish(sol * scale, y, it, true, true));
                }
            }
            let step = (&z - &z_prev).norm();
            if (l1 - prev_l1).abs() <= opts.obj_tol && step <= opts.feas_tol {
                let residual = (&self.a * &z - &yn).norm();
                if residual <= opts.feas_tol {
                    return Ok(self.finish(z * scale, y, it, true, false));
                }
            }
            prev_l1 = l1;
            let progress = Progress { iteration: it, feasible_l1: l1_norm(&v) * scale };
            if monitor(&progress).is_break() {
                return Ok(self.finish(v * scale, y, it, false, false));
            }
        }
        Ok(self.finish(v * scale, y, opts.max_iter, false, false))
    }

    /// Least-squares fit on the support of `z`, or on its `M` largest
    /// entries, accepted only with an optimality certificate. Candidate dual
    /// vectors are the least-norm one and the current ADMM multiplier `dual`,
    /// each corrected so that `Φ_Sᵀp = sign(z_S)` holds exactly.
    fn polish(&self, z: &DVector<f64>, y: &DVector<f64>, dual: &DVector<f64>) -> Option<DVector<f64>> {
        let mut support: Vec<usize> = (0..z.len()).filter(|&i| z[i] != 0.0).collect();
        if support.is_empty() {
            return None;
        }
        if support.len() > self.a.nrows() {
            support.sort_by(|&a, &b| z[b].abs().total_cmp(&z[a].abs()).then(a.cmp(&b)));
            support.truncate(self.a.nrows());
            support.sort_unstable();
        }
        let admm_dual = self.chol.solve(&(&self.a * dual));
        self.certify(support, y, &admm_dual)
    }

    fn certify(&self, mut support: Vec<usize>, y: &DVector<f64>, admm_dual: &DVector<f64>) -> Option<DVector<f64>> {
        let mut fit = self.fit(&support, y)?;
        let peak = fit.amax();
        if fit.iter().any(|v| v.abs() <= 1e-9 * peak) {
            support = support.iter().zip(fit.iter()).filter(|(_, v)| v.abs() > 1e-9 * peak).map(|(&i, _)| i).collect();
            fit = self.fit(&support, y)?;
        }
        let sub = self.a.select_columns(&support);
        if (&sub * &fit - y).norm() > POLISH_FEAS {
            return None;
        }
        let signs = fit.map(f64::signum);
        let inner = sub.tr_mul(&sub).cholesky()?;
        let certified = [DVector::zeros(y.len()), admm_dual.clone()].into_iter().any(|p0| {
            let p = &p0 + &sub * inner.solve(&(&signs - sub.tr_mul(&p0)));
            self.a.tr_mul(&p).amax() <= 1.0 + DUAL_SLACK
        });
        if !certified {
            return None;
        }
        let mut out = DVector::zeros(self.a.ncols());
        for (&i, &v) in support.iter().zip(fit.iter()) {
            out[i] = v;
        }
        Some(out)
    }

    fn fit(&self, support: &[usize], y: &DVector<f64>) -> Option<DVector<f64>> {
        let sub = self.a.select_columns(support);
        sub.tr_mul(&sub).cholesky().map(|c| c.solve(&sub.tr_mul(y)))
    }

    fn finish(&self, estimate: DVector<f64>, y: &DVector<f64>, iterations: usize, converged: bool, certified: bool) -> RecoveryResult {
        let residual = (y - &self.a * &estimate).norm();
        RecoveryResult {
            estimate: estimate.as_slice().to_vec(),
            residual,
            rel_error: None,
            iterations,
            converged,
            solver: SolverKind::L1,
            certified,
        }
    }
}

fn soft(t: f64, threshold: f64) -> f64 {
    if t > threshold {
        t - threshold
    } else if t < -threshold {
        t + threshold
    } else {
        0.0
    }
}

fn default_rho(m: usize, n: usize) -> f64 {
    (n as f64 / m as f64).sqrt() * 10.0
}

/// Solves basis pursuit for `y` with default preparation.
pub fn l1_recover<M: AsDense>(phi: &M, y: &DVector<f64>, opts: &SolverOptions) -> Result<RecoveryResult> {
    BasisPursuit::new(phi.dense().clone())?.solve(y, opts)
}

/// True when `Φ_S` has full column rank on the support `S` of `truth` and the
/// least-norm dual vector `p = Φ_S (Φ_SᵀΦ_S)⁻¹ sign(x_S)` satisfies
/// `|⟨φ_j, p⟩| < 1` off the support. Then `truth` is the unique minimizer of
/// `‖z‖₁` subject to `Φz = Φ·truth`, so any exact basis pursuit solver
/// returns it. A false result proves nothing.
pub fn exact_recovery_certificate<M: AsDense>(phi: &M, truth: &SparseSignal) -> Result<bool> {
    let a = phi.dense();
    if a.ncols() != truth.n {
        return Err(LabError::UniverseMismatch { expected: a.ncols(), got: truth.n });
    }
    let rows: Vec<usize> = (0..a.nrows()).collect();
    Ok(certificate_on_rows(a, &rows, truth))
}

/// The certificate of `exact_recovery_certificate` for the row submatrix
/// `a[rows, :]`, without copying it.
pub(crate) fn certificate_on_rows(a: &DMatrix<f64>, rows: &[usize], truth: &SparseSignal) -> bool {
    let support = truth.support.zero_based();
    if support.len() > rows.len() {
        return false;
    }
    let sub = DMatrix::from_fn(rows.len(), support.len(), |i, j| a[(rows[i], support[j])]);
    let signs = DVector::from_iterator(truth.values.len(), truth.values.iter().map(|v| v.signum()));
    let Some(coef) = sub.tr_mul(&sub).cholesky().map(|c| c.solve(&signs)) else {
        return false;
    };
    let p = &sub * coef;
    let mut on_support = vec![false; a.ncols()];
    for &j in &support {
        on_support[j] = true;
    }
    (0..a.ncols()).filter(|&j| !on_support[j]).all(|j| {
        let col = a.column(j);
        let corr: f64 = rows.iter().zip(p.iter()).map(|(&i, &pi)| col[i] * pi).sum();
        corr.abs() < 1.0 - DUAL_SLACK
    })
}
