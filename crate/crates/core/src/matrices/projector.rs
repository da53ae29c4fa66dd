//! Projector algebra on the column space of a dense matrix.

use nalgebra::DMatrix;

use super::{select_cols, IndexSet};
use crate::error::{LabError, Result};

/// Columns whose smallest singular value falls below this fraction of the
/// largest are treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Tolerance on the Frobenius idempotence and symmetry errors accepted by
/// [`complement_projector`].
pub const PROJECTOR_TOLERANCE: f64 = 1e-8;

/// `P_Λ = A_Λ A_Λ^†`, the orthogonal projector onto the span of the columns
/// of `a` indexed by `lambda`.
///
/// Computed from a thin SVD of `A_Λ` as `U Uᵀ`. An empty `lambda` gives the
/// zero projector.
pub fn range_projector(a: &DMatrix<f64>, lambda: &IndexSet) -> Result<DMatrix<f64>> {
    lambda.expect_universe(a.ncols())?;
    let m = a.nrows();
    if lambda.is_empty() {
        return Ok(DMatrix::zeros(m, m));
    }
    if lambda.len() > m {
        return Err(LabError::SingularSelection { smallest: 0.0, largest: f64::NAN });
    }
    let a_l = select_cols(a, lambda)?;
    let svd = a_l.svd(true, false);
    let sv = &svd.singular_values;
    let largest = sv.max();
    let smallest = sv.min();
    if !(smallest >= RANK_TOLERANCE * largest) || largest == 0.0 {
        return Err(LabError::SingularSelection { smallest, largest });
    }
    let u = svd.u.expect("left singular vectors requested");
    Ok(&u * u.transpose())
}

/// `P^⊥ = I − P`.
pub fn complement_projector(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !p.is_square() {
        return Err(LabError::InvalidDimension(format!(
            "projector must be square, got {}x{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let idempotence = (p * p - p).norm();
    let symmetry = (p - p.transpose()).norm();
    if idempotence > PROJECTOR_TOLERANCE || symmetry > PROJECTOR_TOLERANCE {
        return Err(LabError::NotAProjector { idempotence, symmetry });
    }
    Ok(DMatrix::identity(p.nrows(), p.ncols()) - p)
}

/// `I(Γ)`: the diagonal 0/1 matrix with ones at the positions in `gamma`.
pub fn selector_diagonal(gamma: &IndexSet) -> DMatrix<f64> {
    let n = gamma.universe();
    let mut d = DMatrix::zeros(n, n);
    for i in gamma.zero_based() {
        d[(i, i)] = 1.0;
    }
    d
}
