//! Constants of the democracy theorem: the implicit measurement count
//! `M = C₁(K+D)·ln((N+M)/(K+D))`, the exponent `C₂ = (δ/8)² − ln(42e/δ)/C₁`,
//! and the covering parameters `ε = δ/14`, `η = δ/(2√2)` used for the
//! augmented matrix.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

const MAX_ITERATIONS: usize = 1000;
const RELATIVE_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub k: usize,
    pub d: usize,
    pub n: usize,
    pub m_required: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub iterations: usize,
}

impl TheoremConstants {
    /// Lower bound on the probability that the theorem's conclusion holds,
    /// `1 − 3e^{−C₂M}`. Vacuous (≤ 0) when `C₂ ≤ 0`.
    pub fn success_probability(&self) -> f64 {
        1.0 - 3.0 * (-self.c2 * self.m_required).exp()
    }
}

/// `C₂` as a function of `δ` and `C₁`. May be negative.
pub fn c2(delta: f64, c1: f64) -> f64 {
    (delta / 8.0).powi(2) - (42.0 * std::f64::consts::E / delta).ln() / c1
}

/// The `C₁` at which `C₂` changes sign.
pub fn c1_break_even(delta: f64) -> f64 {
    (42.0 * std::f64::consts::E / delta).ln() / (delta / 8.0).powi(2)
}

/// Right-hand side of the implicit measurement-count equation.
pub fn measurement_map(m: f64, c1: f64, k: usize, d: usize, n: usize) -> f64 {
    let s = (k + d) as f64;
    c1 * s * ((n as f64 + m) / s).ln()
}

pub fn theorem1_constants(k: usize, d: usize, n: usize, c1: f64, delta: f64) -> Result<TheoremConstants> {
    if !(c1 > 0.0) {
        return Err(LabError::Precondition(format!("c1 must be positive, got {c1}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LabError::Precondition(format!("delta must lie in (0, 1), got {delta}")));
    }
    if k + d == 0 {
        return Err(LabError::Precondition("k + d must be at least 1".into()));
    }
    let s = (k + d) as f64;
    let mut m = c1 * s * (n as f64 / s).ln();
    let mut iterations = 0;
    loop {
        if !(n as f64 + m > 0.0) {
            return Err(LabError::Numeric(format!(
                "fixed-point iterate {m} leaves the domain of the logarithm"
            )));
        }
        let next = measurement_map(m, c1, k, d, n);
        iterations += 1;
        let done = (next - m).abs() <= RELATIVE_TOLERANCE * next.abs().max(1.0);
        m = next;
        if done {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(LabError::Numeric(format!(
                "measurement-count fixed point did not converge in {MAX_ITERATIONS} iterations"
            )));
        }
    }
    Ok(TheoremConstants {
        c1,
        c2: c2(delta, c1),
        delta,
        k,
        d,
        n,
        m_required: m,
        epsilon: delta / 14.0,
        eta: delta / (2.0 * 2f64.sqrt()),
        iterations,
    })
}
