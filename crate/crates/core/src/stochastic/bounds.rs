//! Bound machinery around the chain representation: the F* amplitude of
//! the upper branch, the anti-Chebyshev inequality, and the constants of
//! the strict-positivity lower bound for the solved profile.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponents::ExponentReport;
use crate::model::{DemandSpec, ModelConfig};
use crate::quad;

use super::chain::{sample_step, truncated_log_moment};
use super::RandomStream;

/// Probe-lattice estimate of F* = max |1 − F(x, y)|/(1−x) over the upper
/// branch, together with the closed-form bound available for monotone
/// kernels.
#[derive(Debug, Clone, Copy)]
pub struct FStarEstimate {
    pub probe_max: f64,
    pub monotone_bound: f64,
}

pub fn f_star_estimate(
    config: &ModelConfig,
    report: &ExponentReport,
    n_probe: usize,
) -> Result<FStarEstimate> {
    if n_probe < 4 {
        return Err(Error::Spec(format!(
            "F* probe lattice needs ≥ 4 points, got {n_probe}"
        )));
    }
    let x_star = config.x_star();
    let c1 = config.c_small(1.0)?;
    let r1 = config.kernel().density(1.0);
    let alpha = report.alpha;

    let mut probe_max = 0.0_f64;
    let mut c_gap_max = 0.0_f64;
    for i in 0..n_probe {
        let x = x_star + (1.0 - 1e-4 - x_star) * i as f64 / (n_probe - 1) as f64;
        let c_x = config.c_small(x)?;
        c_gap_max = c_gap_max.max((c1 - c_x).abs() / (1.0 - x));
        for j in 0..n_probe {
            let y = x + (1.0 - x) * j as f64 / (n_probe - 1) as f64;
            let ratio = y / x;
            let f = (c1 / c_x) * (config.kernel().density(ratio) / r1) * ratio.powf(alpha) / x;
            probe_max = probe_max.max((1.0 - f).abs() / (1.0 - x));
        }
    }
    let c_star = config.c_star(512);
    let monotone_bound = (c1 + c_gap_max) / (x_star * c_star);
    Ok(FStarEstimate {
        probe_max,
        monotone_bound,
    })
}

/// Result of one anti-Chebyshev experiment.
#[derive(Debug, Clone, Copy)]
pub struct AntiChebyshev {
    pub empirical: f64,
    pub bound: f64,
    pub std_error: f64,
    pub pass: bool,
}

/// Estimate P{Σ_{k≤n} Y_k > n·Y_lower/2} over `trials` independent trials
/// and compare with the bound 1/(2 Y_upper/Y_lower − 1).  The generator
/// produces one trial's sequence of n positive values ≤ Y_upper with
/// conditional means ≥ Y_lower.
pub fn anti_chebyshev_check<G>(
    mut trial: G,
    n: usize,
    y_lower: f64,
    y_upper: f64,
    trials: usize,
    stream: RandomStream,
) -> Result<AntiChebyshev>
where
    G: FnMut(&mut ChaCha8Rng) -> Vec<f64>,
{
    if !(y_lower > 0.0 && y_upper >= y_lower) {
        return Err(Error::Precondition(format!(
            "anti-Chebyshev needs 0 < Y_lower ≤ Y_upper, got ({y_lower}, {y_upper})"
        )));
    }
    if n == 0 || trials == 0 {
        return Err(Error::Domain("need n ≥ 1 and trials ≥ 1".into()));
    }
    let mut rng = stream.rng();
    let cutoff = 0.5 * n as f64 * y_lower;
    let mut successes = 0usize;
    for _ in 0..trials {
        let ys = trial(&mut rng);
        if ys.len() != n {
            return Err(Error::Precondition(format!(
                "generator produced {} values, expected {n}",
                ys.len()
            )));
        }
        for &y in &ys {
            if !(y > 0.0) || y > y_upper * (1.0 + 1e-9) {
                return Err(Error::Precondition(format!(
                    "generator value {y} outside (0, {y_upper}]"
                )));
            }
        }
        if ys.iter().sum::<f64>() > cutoff {
            successes += 1;
        }
    }
    let empirical = successes as f64 / trials as f64;
    let bound = 1.0 / (2.0 * y_upper / y_lower - 1.0);
    let std_error = (empirical * (1.0 - empirical) / trials as f64).sqrt();
    Ok(AntiChebyshev {
        empirical,
        bound,
        std_error,
        pass: empirical >= bound - 3.0 * std_error,
    })
}

/// One trial of chain log-increments for the anti-Chebyshev experiment:
/// Y_k = ln(x_{k+1}/x_k) along the lower branch; once the chain passes the
/// threshold, further increments are drawn from the frozen law at the
/// threshold (which has the minimal conditional mean Y_*), keeping both
/// hypotheses intact for every k.
pub fn chain_log_increment_trial(
    config: &ModelConfig,
    report: &ExponentReport,
    x0: f64,
    threshold: f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut x = x0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let from = x.min(threshold);
        let y = sample_step(config, report, from, rng).expect("valid chain state");
        out.push((y / from).ln());
        if x <= threshold {
            x = y;
        }
    }
    out
}

/// Constants of the strict-positivity lower bound
/// ρ(x) ≥ ρ_* e^{−C} (ln 1/x)^{−g} (slowly varying demand) and the flat
/// factor ρ ≥ ρ_* exp(−μ/(1−e_*)) (linear/saturating demand).
#[derive(Debug, Clone, Copy)]
pub struct LowerBoundConstants {
    /// Tail-domination constant from Z_α(x)/((1−x)c(x)) ≥ 1/(1+μx).
    pub mu: f64,
    /// e_* = E_{x_*} ξ^{−1} < 1.
    pub e_star: f64,
    /// λ_* = ln(1/e_*).
    pub lambda_star: f64,
    /// g = 1/(λ_* R₀).
    pub g: f64,
    /// C = μ/(1−e_*) + (1 + ln(2/Y_*))/(λ_* R₀).
    pub c_const: f64,
    /// exp(−μ/(1−e_*)), the flat lower-bound factor.
    pub flat_factor: f64,
}

pub fn lower_bound_constants(
    config: &ModelConfig,
    report: &ExponentReport,
) -> Result<LowerBoundConstants> {
    let alpha = report.alpha;
    let threshold = config.kernel().moment_divergence_threshold();
    if threshold <= alpha + 1.0 {
        return Err(Error::Precondition(format!(
            "kernel tail too heavy for the lower bound: needs moments past {} (threshold {threshold})",
            alpha + 1.0
        )));
    }
    let x_star = config.x_star();
    let r0 = config.r0();
    let slowly_varying = matches!(config.demand(), DemandSpec::SlowlyVarying);

    // μ from the tail-domination inequality, maximized over a probe sweep
    let mut mu = 0.0_f64;
    let n_probe = 240;
    for i in 0..n_probe {
        let t = i as f64 / (n_probe - 1) as f64;
        let x = 1e-6_f64.powf(1.0 - t) * x_star.powf(t);
        let z = config.kernel().z_mass(alpha, x)?;
        if z <= 0.0 {
            continue;
        }
        let mut ratio = (1.0 - x) * config.c_small(x)? / z;
        if slowly_varying {
            ratio /= 1.0 + 1.0 / (r0 * config.demand().value(1.0 / x));
        }
        mu = mu.max((ratio - 1.0) / x);
    }

    // e_* = E_{x_*} ξ^{−1}
    let z_star = config.kernel().z_mass(alpha, x_star)?;
    let breaks = config.kernel().breakpoints(1.0, 1.0 / x_star);
    let num = quad::integrate_split(
        |s: f64| s.powf(alpha - 1.0) * config.kernel().density(s),
        &breaks,
        1e-11,
    )?
    .value;
    let e_star = num / z_star;
    if !(e_star > 0.0 && e_star < 1.0) {
        return Err(Error::Precondition(format!(
            "e_* = {e_star} must lie in (0, 1)"
        )));
    }
    let lambda_star = -e_star.ln();
    let g = 1.0 / (lambda_star * r0);
    let y_star = truncated_log_moment(config.kernel(), alpha, x_star)?;
    let c_const = mu / (1.0 - e_star) + (1.0 + (2.0 / y_star).ln()) / (lambda_star * r0);
    let flat_factor = (-mu / (1.0 - e_star)).exp();
    Ok(LowerBoundConstants {
        mu,
        e_star,
        lambda_star,
        g,
        c_const,
        flat_factor,
    })
}
