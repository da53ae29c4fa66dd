use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Sorted, duplicate-free set of 1-based indices into `1..=universe`.
///
/// Row selections (Γ), column selections (Λ) and signal supports all use this
/// type. Indices are 1-based on every external surface; use
/// [`IndexSet::zero_based`] when indexing matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIndexSet")]
pub struct IndexSet {
    indices: Vec<usize>,
    universe: usize,
}

#[derive(Deserialize)]
struct RawIndexSet {
    indices: Vec<usize>,
    universe: usize,
}

impl TryFrom<RawIndexSet> for IndexSet {
    type Error = LabError;

    fn try_from(raw: RawIndexSet) -> Result<Self> {
        IndexSet::new(raw.indices, raw.universe)
    }
}

impl IndexSet {
    /// Build from 1-based indices in any order. Duplicates and out-of-range
    /// values are rejected.
    pub fn new(mut indices: Vec<usize>, universe: usize) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(LabError::Format(format!("duplicate index {}", w[0])));
            }
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > universe) {
            return Err(LabError::IndexOutOfRange { index: bad, universe });
        }
        Ok(Self { indices, universe })
    }

    pub fn from_zero_based(indices: &[usize], universe: usize) -> Result<Self> {
        Self::new(indices.iter().map(|i| i + 1).collect(), universe)
    }

    pub fn full(universe: usize) -> Self {
        Self { indices: (1..=universe).collect(), universe }
    }

    pub fn empty(universe: usize) -> Self {
        Self { indices: Vec::new(), universe }
    }

    /// `{1..=n} ∖ self`.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.universe - self.indices.len());
        let mut it = self.indices.iter().peekable();
        for i in 1..=self.universe {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        Self { indices: out, universe: self.universe }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i - 1).collect()
    }

    pub(crate) fn expect_universe(&self, expected: usize) -> Result<()> {
        if self.universe != expected {
            return Err(LabError::UniverseMismatch { expected, got: self.universe });
        }
        Ok(())
    }
}
