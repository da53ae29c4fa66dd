use nalgebra::DVector;

use super::{RecoveryResult, SolverKind};
use crate::error::{LabError, Result};
use crate::matrices::AsDense;

/// Orthogonal matching pursuit: `k` greedy steps, each adding the column most
/// correlated with the residual and refitting by least squares. Stops early
/// once the residual vanishes.
pub fn omp_recover<M: AsDense>(phi: &M, y: &DVector<f64>, k: usize) -> Result<RecoveryResult> {
    let a = phi.dense();
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(LabError::UniverseMismatch { expected: m, got: y.len() });
    }
    if k > m || k > n {
        return Err(LabError::Precondition(format!("sparsity {k} exceeds the {m}x{n} system")));
    }
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let floor = 1e-13 * y.norm();
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut coef = DVector::zeros(0);
    let mut residual = y.clone();
    let mut steps = 0;
    for step in 1..=k {
        if residual.norm() <= floor {
            break;
        }
        let corr = a.tr_mul(&residual);
        let best = (0..n)
            .filter(|j| !support.contains(j) && norms[*j] > 0.0)
            .max_by(|&i, &j| (corr[i].abs() / norms[i]).total_cmp(&(corr[j].abs() / norms[j])).then(j.cmp(&i)))
            .ok_or(LabError::DegenerateSelection { step })?;
        support.push(best);
        let sub = a.select_columns(&support);
        coef = sub
            .tr_mul(&sub)
            .cholesky()
            .map(|c| c.solve(&sub.tr_mul(y)))
            .ok_or(LabError::DegenerateSelection { step })?;
        residual = y - &sub * &coef;
        steps = step;
    }
    let mut estimate = vec![0.0; n];
    for (&j, &v) in support.iter().zip(coef.iter()) {
        estimate[j] = v;
    }
    Ok(RecoveryResult {
        estimate,
        residual: residual.norm(),
        rel_error: None,
        iterations: steps,
        converged: true,
        solver: SolverKind::Omp,
        certified: false,
    })
}
