//! Monte Carlo study of `‖Au‖²` for `A = [I | Φ]` and a fixed vector
//! `u = (w, x)`, plus a moment-generating-function test for the entry
//! distributions.
//!
//! Each trial draws a fresh `Φ` from its own derived stream, so the result is
//! a pure function of the configuration regardless of thread count.

use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::matrices::io::format_f64;
use crate::matrices::{EntryDistribution, MeasurementMatrix};
use crate::riplab::ViolationReport;
use crate::seed::derived_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub m: usize,
    pub n: usize,
    pub eta: f64,
    pub trials: u64,
    pub seed: u64,
    pub w_norm: f64,
    pub x_norm: f64,
    #[serde(default)]
    pub dist: EntryDistribution,
}

impl ConcentrationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(LabError::InvalidDimension(format!("m = {} and n = {} must be positive", self.m, self.n)));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(LabError::Precondition(format!("eta must lie in (0, 1), got {}", self.eta)));
        }
        if self.trials == 0 {
            return Err(LabError::Precondition("trials must be at least 1".into()));
        }
        let norms_ok = |v: f64| v.is_finite() && v >= 0.0;
        if !norms_ok(self.w_norm) || !norms_ok(self.x_norm) || self.w_norm + self.x_norm == 0.0 {
            return Err(LabError::Precondition(format!(
                "split norms must be finite, non-negative and not both zero, got ({}, {})",
                self.w_norm, self.x_norm
            )));
        }
        Ok(())
    }

    /// The first block is a constant vector and the second alternates in sign,
    /// each scaled to its requested norm.
    pub fn test_vector(&self) -> (DVector<f64>, DVector<f64>) {
        let w = DVector::from_element(self.m, self.w_norm / (self.m as f64).sqrt());
        let step = self.x_norm / (self.n as f64).sqrt();
        let x = DVector::from_fn(self.n, |j, _| if j % 2 == 0 { step } else { -step });
        (w, x)
    }

    pub fn u_norm_sq(&self) -> f64 {
        let (w, x) = self.test_vector();
        w.norm_squared() + x.norm_squared()
    }
}

/// One trial: `‖Au‖²`, the cross term `2wᵀΦx` and `‖Φx‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTrial {
    pub trial: u64,
    pub au_norm_sq: f64,
    pub cross_term: f64,
    pub phi_x_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub trials: u64,
    pub empirical_mean: f64,
    pub target_mean: f64,
    pub mean_std_error: f64,
    pub empirical_tail: f64,
    pub bound: f64,
    pub cross_term_tail: f64,
    pub cross_term_bound: f64,
    pub cross_term_variance: f64,
    pub cross_term_variance_target: f64,
    pub phi_tail: f64,
    pub phi_bound: f64,
    pub dist: EntryDistribution,
    /// The closed-form bounds use the Gaussian constant; for other entry
    /// distributions they are reported for reference only.
    pub informational: bool,
}

impl TailReport {
    pub fn mean_within(&self, std_errors: f64) -> bool {
        (self.empirical_mean - self.target_mean).abs() <= std_errors * self.mean_std_error
    }

    pub fn tails_below_bounds(&self) -> bool {
        self.empirical_tail <= self.bound && self.phi_tail <= self.phi_bound && self.cross_term_tail <= self.cross_term_bound
    }

    /// Relative error of the cross-term sample variance against `4‖w‖²‖x‖²/M`.
    pub fn cross_variance_rel_error(&self) -> f64 {
        if self.cross_term_variance_target == 0.0 {
            return self.cross_term_variance.abs();
        }
        (self.cross_term_variance / self.cross_term_variance_target - 1.0).abs()
    }
}

pub fn run_trials(cfg: &ConcentrationConfig) -> Result<Vec<ConcentrationTrial>> {
    cfg.validate()?;
    let (w, x) = cfg.test_vector();
    let std_dev = (1.0 / cfg.m as f64).sqrt();
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = derived_rng(cfg.seed, &[trial]);
            let (mut au, mut cross, mut phi) = (0.0, 0.0, 0.0);
            for i in 0..cfg.m {
                let mut v = 0.0;
                for xj in x.iter() {
                    v += cfg.dist.sample(&mut rng, std_dev) * xj;
                }
                let s = w[i] + v;
                au += s * s;
                cross += 2.0 * w[i] * v;
                phi += v * v;
            }
            ConcentrationTrial { trial, au_norm_sq: au, cross_term: cross, phi_x_norm_sq: phi }
        })
        .collect();
    Ok(trials)
}

pub fn summarize(cfg: &ConcentrationConfig, trials: &[ConcentrationTrial]) -> Result<TailReport> {
    cfg.validate()?;
    if trials.is_empty() {
        return Err(LabError::Precondition("no trials to summarize".into()));
    }
    let (w, x) = cfg.test_vector();
    let (w2, x2) = (w.norm_squared(), x.norm_squared());
    let u2 = w2 + x2;
    let wx = (w2 * x2).sqrt();
    let count = trials.len() as f64;

    let mean = |f: fn(&ConcentrationTrial) -> f64| trials.iter().map(f).sum::<f64>() / count;
    let variance = |f: fn(&ConcentrationTrial) -> f64, mu: f64| {
        if trials.len() < 2 {
            return 0.0;
        }
        trials.iter().map(|t| (f(t) - mu).powi(2)).sum::<f64>() / (count - 1.0)
    };
    let fraction = |hit: &dyn Fn(&ConcentrationTrial) -> bool| trials.iter().filter(|t| hit(t)).count() as f64 / count;

    let au_mean = mean(|t| t.au_norm_sq);
    let cross_mean = mean(|t| t.cross_term);
    let eta = cfg.eta;
    let exponent = (-(cfg.m as f64) * eta * eta / 8.0).exp();

    Ok(TailReport {
        trials: trials.len() as u64,
        empirical_mean: au_mean,
        target_mean: u2,
        mean_std_error: (variance(|t| t.au_norm_sq, au_mean) / count).sqrt(),
        empirical_tail: fraction(&|t| (t.au_norm_sq - u2).abs() >= 2.0 * eta * u2),
        bound: 3.0 * exponent,
        cross_term_tail: if wx == 0.0 { 0.0 } else { fraction(&|t| t.cross_term.abs() >= eta * wx) },
        cross_term_bound: exponent,
        cross_term_variance: variance(|t| t.cross_term, cross_mean),
        cross_term_variance_target: 4.0 * w2 * x2 / cfg.m as f64,
        phi_tail: if x2 == 0.0 { 0.0 } else { fraction(&|t| (t.phi_x_norm_sq - x2).abs() >= eta * x2) },
        phi_bound: 2.0 * exponent,
        dist: cfg.dist,
        informational: cfg.dist != EntryDistribution::Gaussian,
    })
}

pub fn concentration_experiment(cfg: &ConcentrationConfig) -> Result<TailReport> {
    summarize(cfg, &run_trials(cfg)?)
}

/// Per-trial deviations `‖Au‖² − ‖u‖²`, cross terms and `‖Φx‖² − ‖x‖²` as CSV.
pub fn write_trials_csv<W: Write>(cfg: &ConcentrationConfig, trials: &[ConcentrationTrial], w: W) -> Result<()> {
    let (_, x) = cfg.test_vector();
    let (u2, x2) = (cfg.u_norm_sq(), x.norm_squared());
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["trial", "au_deviation", "cross_term", "phi_x_deviation"])?;
    for t in trials {
        out.write_record([
            t.trial.to_string(),
            format_f64(t.au_norm_sq - u2),
            format_f64(t.cross_term),
            format_f64(t.phi_x_norm_sq - x2),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `|‖Au‖² − (‖w‖² + 2wᵀΦx + ‖Φx‖²)|` for `u = (w, x)` split after the first
/// `M` entries.
pub fn decomposition_identity(phi: &MeasurementMatrix, u: &DVector<f64>) -> Result<f64> {
    let (m, n) = (phi.rows(), phi.cols());
    if u.len() != m + n {
        return Err(LabError::UniverseMismatch { expected: m + n, got: u.len() });
    }
    let w = u.rows(0, m).clone_owned();
    let x = u.rows(m, n).clone_owned();
    let phi_x = phi.apply(&x);
    let au = &w + &phi_x;
    let split = w.norm_squared() + 2.0 * w.dot(&phi_x) + phi_x.norm_squared();
    Ok((au.norm_squared() - split).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfPoint {
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfReport {
    pub dist: EntryDistribution,
    pub c: f64,
    pub samples: u64,
    pub points: Vec<MgfPoint>,
    pub result: ViolationReport<MgfPoint>,
}

/// Estimates `E e^{tX}` for unit-variance draws of `dist` and flags every `t`
/// where the estimate exceeds `e^{c²t²/2}` by more than three standard errors.
pub fn mgf_check(dist: EntryDistribution, c: f64, t_grid: &[f64], samples: u64, seed: u64) -> Result<MgfReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(LabError::Precondition(format!("c must be positive, got {c}")));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(LabError::Precondition("t grid must be finite".into()));
    }
    if samples < 2 {
        return Err(LabError::Precondition("at least two samples are needed".into()));
    }
    let mut result = ViolationReport::new(0.0);
    let mut points = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        let mut rng = derived_rng(seed, &[i as u64]);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..samples {
            let e = (t * dist.sample_unit(&mut rng)).exp();
            sum += e;
            sum_sq += e * e;
        }
        let count = samples as f64;
        let estimate = sum / count;
        let var = ((sum_sq - count * estimate * estimate) / (count - 1.0)).max(0.0);
        let point = MgfPoint { t, estimate, std_error: (var / count).sqrt(), bound: (c * c * t * t / 2.0).exp() };
        let margin = point.bound - (point.estimate - 3.0 * point.std_error);
        result.record(margin, || point.clone());
        points.push(point);
    }
    Ok(MgfReport { dist, c, samples, points, result })
}
