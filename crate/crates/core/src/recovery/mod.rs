//! Sparse signals and the solvers that recover them from `y = Φx`.

mod l1;
mod omp;
mod signal;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use l1::{exact_recovery_certificate, l1_recover, BasisPursuit, Progress, SolverOptions};
pub(crate) use l1::certificate_on_rows;
pub use omp::omp_recover;
pub use signal::{best_k_term, compressible_signal, random_sparse_signal, SparseSignal};

/// Default relative ℓ2 error below which a recovery counts as exact.
pub const DEFAULT_RECOVERY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    L1,
    Omp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    pub residual: f64,
    pub rel_error: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub solver: SolverKind,
    /// The estimate carries a dual certificate proving it minimizes `‖z‖₁`
    /// over the feasible set.
    #[serde(default)]
    pub certified: bool,
}

impl RecoveryResult {
    pub fn estimate_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.estimate)
    }

    /// Fill in `rel_error` against a known signal.
    pub fn with_truth(mut self, truth: &DVector<f64>) -> Result<Self> {
        self.rel_error = Some(relative_error(truth, &self.estimate_vector())?);
        Ok(self)
    }
}

pub fn relative_error(truth: &DVector<f64>, estimate: &DVector<f64>) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(LabError::UniverseMismatch { expected: truth.len(), got: estimate.len() });
    }
    let scale = truth.norm();
    let diff = (truth - estimate).norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// True when `‖x − x̂‖₂ / ‖x‖₂ ≤ tol`.
pub fn exact_recovery(truth: &SparseSignal, result: &RecoveryResult, tol: f64) -> Result<bool> {
    let rel = relative_error(&truth.dense(), &result.estimate_vector())?;
    Ok(rel <= tol)
}
