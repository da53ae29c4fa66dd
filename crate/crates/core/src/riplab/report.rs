use serde::{Deserialize, Serialize};

use crate::matrices::IndexSet;

/// Violation lists are truncated to this many entries; the total count is
/// always exact.
pub const VIOLATION_CAP: usize = 100;

/// Floating-point slack granted before a bound counts as violated.
pub const EIGEN_SLACK: f64 = 1e-9;

/// Restricted isometry constant of one order, with the supports attaining
/// the extreme restricted eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    pub order: usize,
    pub delta: f64,
    pub worst_low_subset: IndexSet,
    pub worst_high_subset: IndexSet,
    pub low_bound: f64,
    pub high_bound: f64,
    /// Set when the report comes from sampled supports, in which case `delta`
    /// is only a lower bound on the true constant.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub estimated: bool,
}

/// Worst case over row deletions for `(M̃, K, δ)`-democracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemocracyReport {
    pub m_tilde: usize,
    pub order: usize,
    pub delta_bound: f64,
    pub worst_gamma: IndexSet,
    pub worst_delta: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Lower,
    Upper,
}

/// A support on which a restricted eigenvalue leaves its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportViolation {
    pub support: IndexSet,
    pub side: BoundSide,
    pub value: f64,
    pub bound: f64,
}

/// A sparse pair whose inner product is distorted beyond `δ‖u‖‖v‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub sample: u64,
    pub u_support: IndexSet,
    pub v_support: IndexSet,
    pub distortion: f64,
    pub bound: f64,
}

/// Outcome of an exhaustive or sampled check. `min_margin` is the smallest
/// distance to a bound over every case checked (negative when violated), so
/// a clean result can be audited against `slack`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport<V> {
    pub checked: u64,
    pub total_violations: u64,
    pub violations: Vec<V>,
    pub slack: f64,
    pub min_margin: f64,
}

impl<V> ViolationReport<V> {
    pub fn new(slack: f64) -> Self {
        Self { checked: 0, total_violations: 0, violations: Vec::new(), slack, min_margin: f64::INFINITY }
    }

    pub fn holds(&self) -> bool {
        self.total_violations == 0
    }

    /// Record one case with the given margin; `make` builds the violation
    /// record only when needed.
    pub fn record(&mut self, margin: f64, make: impl FnOnce() -> V) {
        self.checked += 1;
        self.min_margin = self.min_margin.min(margin);
        if margin < -self.slack {
            self.total_violations += 1;
            if self.violations.len() < VIOLATION_CAP {
                self.violations.push(make());
            }
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.total_violations += other.total_violations;
        self.min_margin = self.min_margin.min(other.min_margin);
        let room = VIOLATION_CAP.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
        self
    }
}
