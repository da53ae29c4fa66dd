//! Measurement-dropping experiments: how many rows of `y = Φx` can be
//! discarded before basis pursuit stops recovering `x`, under random,
//! all-of-R random and adversarial deletion, plus the error growth when more
//! rows are dropped than the democracy level allows.

mod experiment;
mod output;
mod stability;
mod trial;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::matrices::EntryDistribution;
use crate::recovery::{SolverOptions, DEFAULT_RECOVERY_TOL};

pub use experiment::{fit_line, run_experiment, CurvePoint, ExperimentResult, LinearFit, PolicyFit, TrialResult};
pub use output::{
    gnuplot_script, read_results_csv, read_summary_csv, write_attempts_csv, write_fits_csv, write_results_csv,
    write_summary_csv,
};
pub use stability::{stability_experiment, SignalKind, StabilityConfig, StabilityReport, StabilityRow};
pub use trial::{d_max_adversarial, d_max_democracy, d_max_for_policy, d_max_single, Decision, TrialInstance, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropPolicy {
    /// One uniformly random row subset per drop level.
    RandomSingle,
    /// `R` random row subsets per drop level, all of which must recover.
    RandomMulti,
    /// Drops the rows carrying the largest `|y_i|`.
    AdversarialLargest,
}

impl DropPolicy {
    pub const ALL: [DropPolicy; 3] = [DropPolicy::RandomSingle, DropPolicy::RandomMulti, DropPolicy::AdversarialLargest];

    pub fn name(self) -> &'static str {
        match self {
            DropPolicy::RandomSingle => "random_single",
            DropPolicy::RandomMulti => "random_multi",
            DropPolicy::AdversarialLargest => "adversarial_largest",
        }
    }
}

impl fmt::Display for DropPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DropPolicy {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        DropPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| LabError::Format(format!("unknown drop policy '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub r_submatrices: usize,
    pub policies: Vec<DropPolicy>,
    pub master_seed: u64,
    #[serde(default = "default_tol")]
    pub recovery_tol: f64,
    #[serde(default)]
    pub dist: EntryDistribution,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Decide recovery by a dual certificate or an objective gap whenever one
    /// settles the outcome, running the solver to convergence otherwise.
    #[serde(default = "yes")]
    pub certified_shortcut: bool,
    /// Stop every drop scan at this level.
    #[serde(default)]
    pub d_cap: Option<usize>,
    /// Keep a record of every recovery attempt.
    #[serde(default)]
    pub record_attempts: bool,
}

fn default_tol() -> f64 {
    DEFAULT_RECOVERY_TOL
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    /// Reduced-scale version of the two-curve democracy experiment.
    pub fn figure1_small() -> Self {
        Self {
            n: 512,
            k: 6,
            m_grid: (40..=240).step_by(20).collect(),
            trials: 20,
            r_submatrices: 50,
            policies: vec![DropPolicy::RandomSingle, DropPolicy::RandomMulti],
            master_seed: 2009,
            recovery_tol: DEFAULT_RECOVERY_TOL,
            dist: EntryDistribution::Gaussian,
            solver: SolverOptions::default(),
            certified_shortcut: true,
            d_cap: None,
            record_attempts: false,
        }
    }

    /// Full-scale experiment: N = 2048, K = 13, M up to 380.
    pub fn figure1_paper() -> Self {
        Self {
            n: 2048,
            k: 13,
            m_grid: (10..=380).step_by(10).collect(),
            trials: 100,
            r_submatrices: 300,
            ..Self::figure1_small()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "figure1-small" => Ok(Self::figure1_small()),
            "figure1-paper" => Ok(Self::figure1_paper()),
            other => Err(LabError::Format(format!("unknown preset '{other}' (figure1-small, figure1-paper)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(LabError::InvalidDimension(format!("sparsity {} must lie in 1..={}", self.k, self.n)));
        }
        if self.m_grid.is_empty() {
            return Err(LabError::Precondition("m grid is empty".into()));
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Precondition("m grid must be strictly increasing".into()));
        }
        if self.m_grid[0] == 0 {
            return Err(LabError::Precondition("m must be positive".into()));
        }
        if self.m_grid.iter().any(|&m| m > self.n) {
            return Err(LabError::Precondition(format!("m must not exceed n = {}", self.n)));
        }
        if self.trials == 0 {
            return Err(LabError::Precondition("trials must be at least 1".into()));
        }
        if self.policies.contains(&DropPolicy::RandomMulti) && self.r_submatrices == 0 {
            return Err(LabError::Precondition("r_submatrices must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(LabError::Precondition("no drop policy selected".into()));
        }
        if !(self.recovery_tol > 0.0) {
            return Err(LabError::Precondition(format!("recovery_tol must be positive, got {}", self.recovery_tol)));
        }
        self.solver.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        ExperimentConfig::figure1_small().validate().unwrap();
        let paper = ExperimentConfig::figure1_paper();
        paper.validate().unwrap();
        assert_eq!(paper.m_grid.len(), 38);
        assert_eq!(*paper.m_grid.last().unwrap(), 380);
        assert!(ExperimentConfig::preset("nope").is_err());
    }

    #[test]
    fn invalid_grids() {
        let mut c = ExperimentConfig::figure1_small();
        c.m_grid = vec![60, 60];
        assert!(c.validate().is_err());
        c.m_grid = vec![0, 60];
        assert!(c.validate().is_err());
        c.m_grid = vec![600];
        assert!(c.validate().is_err());
    }

    #[test]
    fn policy_names_round_trip() {
        for p in DropPolicy::ALL {
            assert_eq!(p.name().parse::<DropPolicy>().unwrap(), p);
            assert_eq!(serde_json::to_value(p).unwrap(), p.name());
        }
    }

    #[test]
    fn config_json_defaults() {
        let json = r#"{"n":64,"k":2,"m_grid":[20,30],"trials":2,"r_submatrices":3,
            "policies":["random_single"],"master_seed":1}"#;
        let c: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert!(c.certified_shortcut);
        assert_eq!(c.recovery_tol, DEFAULT_RECOVERY_TOL);
        assert!(serde_json::from_str::<ExperimentConfig>(&json.replace("\"n\"", "\"nn\"")).is_err());
    }
}
