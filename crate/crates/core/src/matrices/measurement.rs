use nalgebra::{DMatrix, DVector};

use super::{EntryDistribution, IndexSet};
use crate::error::{LabError, Result};
use crate::seed::rng_from_seed;

/// Dense `rows × cols` measurement matrix Φ together with the ensemble it was
/// drawn from. Matrices loaded from disk or built by hand carry no ensemble
/// metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    entries: DMatrix<f64>,
    dist: Option<EntryDistribution>,
    seed: Option<u64>,
}

impl MeasurementMatrix {
    /// Draw an i.i.d. matrix with per-entry variance `1/rows`.
    ///
    /// Entries are drawn row by row from a single ChaCha8 stream keyed by
    /// `seed`, so the result is a pure function of the four arguments.
    pub fn generate(rows: usize, cols: usize, dist: EntryDistribution, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LabError::InvalidDimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        let std_dev = (1.0 / rows as f64).sqrt();
        let mut rng = rng_from_seed(seed);
        let mut entries = DMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                entries[(i, j)] = dist.sample(&mut rng, std_dev);
            }
        }
        Ok(Self { entries, dist: Some(dist), seed: Some(seed) })
    }

    pub fn from_entries(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(LabError::InvalidDimension("matrix must be nonempty".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Format("matrix contains non-finite entries".into()));
        }
        Ok(Self { entries, dist: None, seed: None })
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LabError::InvalidDimension(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Self::from_entries(DMatrix::from_row_slice(rows, cols, data))
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn dist(&self) -> Option<EntryDistribution> {
        self.dist
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.entries * x
    }

    /// Φ^Γ: the `|Γ| × cols` matrix of rows indexed by `gamma`.
    pub fn row_submatrix(&self, gamma: &IndexSet) -> Result<Self> {
        Ok(self.derived(select_rows(&self.entries, gamma)?))
    }

    /// Φ_Λ: the `rows × |Λ|` matrix of columns indexed by `lambda`.
    pub fn col_submatrix(&self, lambda: &IndexSet) -> Result<Self> {
        Ok(self.derived(select_cols(&self.entries, lambda)?))
    }

    fn derived(&self, entries: DMatrix<f64>) -> Self {
        Self { entries, dist: self.dist, seed: self.seed }
    }
}

/// Anything that can be viewed as a dense real matrix.
pub trait AsDense {
    fn dense(&self) -> &DMatrix<f64>;
}

impl AsDense for DMatrix<f64> {
    fn dense(&self) -> &DMatrix<f64> {
        self
    }
}

impl AsDense for MeasurementMatrix {
    fn dense(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Rows of `a` indexed by `gamma`, in index order.
pub fn select_rows(a: &DMatrix<f64>, gamma: &IndexSet) -> Result<DMatrix<f64>> {
    gamma.expect_universe(a.nrows())?;
    if gamma.is_empty() {
        return Err(LabError::EmptySelection);
    }
    Ok(a.select_rows(&gamma.zero_based()))
}

/// Columns of `a` indexed by `lambda`, in index order.
pub fn select_cols(a: &DMatrix<f64>, lambda: &IndexSet) -> Result<DMatrix<f64>> {
    lambda.expect_universe(a.ncols())?;
    if lambda.is_empty() {
        return Err(LabError::EmptySelection);
    }
    Ok(a.select_columns(&lambda.zero_based()))
}

/// `I(Γ)·a`: `a` with every row outside `gamma` replaced by zeros.
pub fn masked_product(a: &DMatrix<f64>, gamma: &IndexSet) -> Result<DMatrix<f64>> {
    gamma.expect_universe(a.nrows())?;
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for i in gamma.zero_based() {
        out.set_row(i, &a.row(i));
    }
    Ok(out)
}

/// `A = [I | Φ]`, of size `M × (M + N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    base: MeasurementMatrix,
    full: DMatrix<f64>,
}

impl AugmentedMatrix {
    pub fn new(base: MeasurementMatrix) -> Self {
        let (m, n) = (base.rows(), base.cols());
        let mut full = DMatrix::zeros(m, m + n);
        full.view_mut((0, 0), (m, m)).fill_with_identity();
        full.view_mut((0, m), (m, n)).copy_from(base.entries());
        Self { base, full }
    }

    pub fn base(&self) -> &MeasurementMatrix {
        &self.base
    }

    pub fn full(&self) -> &DMatrix<f64> {
        &self.full
    }

    /// Number of identity columns (M).
    pub fn identity_width(&self) -> usize {
        self.base.rows()
    }
}

impl AsDense for AugmentedMatrix {
    fn dense(&self) -> &DMatrix<f64> {
        &self.full
    }
}

pub fn augment_identity(m: &MeasurementMatrix) -> AugmentedMatrix {
    AugmentedMatrix::new(m.clone())
}
