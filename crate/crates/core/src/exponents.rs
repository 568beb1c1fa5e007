//! Predicted Pareto exponents and ansatz constants (b, d, α, a_net, a_gross).
//!
//! `b` is the net-income density exponent n(s) = O(s^{-b}) (modulo a slowly
//! varying factor for unbounded slowly varying demand).  `alpha` is the
//! kernel-weight exponent appearing inside the fixed-point operator and the
//! chain transition law: 0 for linear and slowly varying demand, the root of
//! m_α = 1 + 1/(S₀R₀) for saturating demand.  The factorized density uses
//! the power x^(α+2), which equals b for the saturating class and b − 1 for
//! linear demand (where σ(s) = s itself contributes one power of s).

use crate::error::{Error, Result};
use crate::model::{DemandSpec, KernelSpec, ModelConfig};
use crate::roots;

/// Derived exponents for one model instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentReport {
    /// Net-income density exponent: 3 (linear), 2 (slowly varying), 2 + α (saturating).
    pub b: f64,
    /// Boundary exponent of the (1−x)^d factor at the minimal income; > −1.
    pub d: f64,
    /// Operator exponent: 0 for linear/slowly varying, the transcendental root for saturating.
    pub alpha: f64,
    /// Cumulative net-income Pareto exponent, b − 1.
    pub a_net: f64,
    /// Cumulative gross-income Pareto exponent.
    pub a_gross: f64,
}

/// Boundary exponent d = R(1)/C(1) − 1.
pub fn compute_d(config: &ModelConfig) -> Result<f64> {
    let c1 = config.c_at_one();
    if !(c1 > 0.0) {
        return Err(Error::Spec(format!("C(1) = {c1} must be positive for d")));
    }
    let d = config.kernel().big_r(1.0) / c1 - 1.0;
    debug_assert!(d > -1.0);
    Ok(d)
}

/// Operator exponent α: zero except for saturating demand, where it solves
/// m_α = 1 + 1/(S₀R₀) by bracketed bisection (the root is unique because
/// m_a is strictly increasing).
pub fn alpha_root(config: &ModelConfig) -> Result<f64> {
    let s0 = match config.demand() {
        DemandSpec::Sigmoidal { s0 } => *s0,
        _ => return Ok(0.0),
    };
    let target = 1.0 + 1.0 / (s0 * config.r0());
    let phi = |a: f64| config.kernel().moment(a).map(|m| m - target);
    let threshold = config.kernel().moment_divergence_threshold();

    // geometric scan for an upper bracket below the divergence threshold
    let mut hi = 0.25_f64;
    loop {
        if hi >= threshold {
            hi = threshold * (1.0 - 1e-9);
        }
        if phi(hi)? > 0.0 {
            break;
        }
        if hi >= threshold * (1.0 - 2e-9) {
            return Err(Error::Precondition(format!(
                "m_a stays below {target} for every finite moment (threshold {threshold})"
            )));
        }
        hi *= 2.0;
    }
    let root = roots::bisect(
        |a| phi(a).expect("moment finite inside bracket"),
        0.0,
        hi,
        1e-9,
        200,
    )?;
    Ok(root)
}

/// Net-income density exponent b.
pub fn compute_b(config: &ModelConfig) -> Result<f64> {
    match config.demand() {
        DemandSpec::Linear => Ok(3.0),
        DemandSpec::SlowlyVarying => Ok(2.0),
        DemandSpec::Sigmoidal { .. } => Ok(2.0 + alpha_root(config)?),
    }
}

/// First-order solution of m_α = 1 + δ: α ≈ δ / ∫ r(s) ln s ds.
pub fn approx_alpha(kernel: &KernelSpec, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("δ must be ≥ 0, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    Ok(delta / kernel.log_moment()?)
}

/// Cumulative gross-income exponent: 1 for linear and slowly varying
/// demand, 1 + α for saturating demand.
pub fn gross_exponent(config: &ModelConfig) -> Result<f64> {
    match config.demand() {
        DemandSpec::Linear | DemandSpec::SlowlyVarying => Ok(1.0),
        DemandSpec::Sigmoidal { .. } => Ok(1.0 + alpha_root(config)?),
    }
}

/// Full report for one config.
pub fn compute(config: &ModelConfig) -> Result<ExponentReport> {
    let alpha = alpha_root(config)?;
    let b = match config.demand() {
        DemandSpec::Linear => 3.0,
        DemandSpec::SlowlyVarying => 2.0,
        DemandSpec::Sigmoidal { .. } => 2.0 + alpha,
    };
    let d = compute_d(config)?;
    Ok(ExponentReport {
        b,
        d,
        alpha,
        a_net: b - 1.0,
        a_gross: gross_exponent(config)?,
    })
}
