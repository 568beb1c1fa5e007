//! The monotone multiplicative Markov chain on (0, 1] and the
//! product-of-weights representation of ρ.
//!
//! Transition law: below the switch point x′ = x·ξ with ξ ~ s^α r(s)/Z_α(x)
//! on [1, 1/x]; above it x′ = 1 − (1−x)·U^{1/(d+1)}.  The weight F(x, y) is
//! defined so that E_x[F(x, x₁) h(x₁)] reproduces (A h)(x) exactly on both
//! branches, which makes ρ(x) = E_x ∏ F(x_{n−1}, x_n) the probabilistic
//! twin of the deterministic solver.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::ExponentReport;
use crate::model::{KernelSpec, ModelConfig};
use crate::quad;
use crate::stats;

use super::RandomStream;

/// Stopping/capping controls for path simulation.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    /// Stop a ρ-path once x > 1 − epsilon_stop (F → 1 and ρ → 1 there; the
    /// truncation bias is far below Monte Carlo noise).
    pub epsilon_stop: f64,
    /// Hard cap on steps per path; capped paths are counted, not dropped.
    pub step_cap: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            epsilon_stop: 1e-6,
            step_cap: 1_000_000,
        }
    }
}

/// One realized path with its exit index and accumulated F-product.
#[derive(Debug, Clone)]
pub struct ChainPath {
    pub states: Vec<f64>,
    pub exit_index: usize,
    pub f_product: f64,
    pub capped: bool,
}

/// Monte Carlo estimate with its sampling error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub capped: usize,
}

/// Exit-time sample for one path.
#[derive(Debug, Clone, Copy)]
pub struct ExitSample {
    pub steps: usize,
    pub capped: bool,
}

/// Lemma-style exit bound: exit within `n_steps` has probability at least
/// `prob_bound`.
#[derive(Debug, Clone, Copy)]
pub struct ExitBound {
    pub n_steps: usize,
    pub prob_bound: f64,
    /// Y_* = E_{x_*} ln ξ, the minimal mean log-increment.
    pub y_star: f64,
    /// Y*(x) = ln(x_*/x).
    pub y_upper: f64,
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// One transition from x ∈ (0, 1).
pub fn sample_step(
    config: &ModelConfig,
    report: &ExponentReport,
    x: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "chain state must lie in (0, 1), got {x}"
        )));
    }
    if x > config.x_star() {
        let u = open01(rng);
        Ok(1.0 - (1.0 - x) * u.powf(1.0 / (report.d + 1.0)))
    } else {
        for _ in 0..64 {
            let xi = config.kernel().sample_truncated(report.alpha, x, rng);
            let next = (x * xi).min(1.0);
            if next > x {
                return Ok(next);
            }
        }
        Err(Error::Precondition(format!(
            "truncated step from x = {x} failed to move"
        )))
    }
}

/// The weight F(x, y) associated with the transition law.
pub fn f_factor(config: &ModelConfig, report: &ExponentReport, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x <= y && y <= 1.0) {
        return Err(Error::Domain(format!(
            "F needs 0 < x ≤ y ≤ 1, got ({x}, {y})"
        )));
    }
    let c_x = config.c_small(x)?;
    if x <= config.x_star() {
        let z = config.kernel().z_mass(report.alpha, x)?;
        Ok(z / ((1.0 - x) * c_x) * ((1.0 - y) / (1.0 - x)).powf(report.d))
    } else {
        let c1 = config.c_small(1.0)?;
        let r1 = config.kernel().density(1.0);
        let ratio = y / x;
        Ok((c1 / c_x) * (config.kernel().density(ratio) / r1) * ratio.powf(report.alpha) / x)
    }
}

fn run_rho_path(
    config: &ModelConfig,
    report: &ExponentReport,
    x0: f64,
    opts: &McOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, bool)> {
    let mut x = x0;
    let mut product = 1.0;
    let mut steps = 0usize;
    while x <= 1.0 - opts.epsilon_stop {
        if steps >= opts.step_cap {
            return Ok((product, true));
        }
        let y = sample_step(config, report, x, rng)?;
        product *= f_factor(config, report, x, y)?;
        x = y;
        steps += 1;
    }
    Ok((product, false))
}

/// Full path record (states retained) — diagnostic companion of
/// [`estimate_rho_mc`].
pub fn sample_chain_path(
    config: &ModelConfig,
    report: &ExponentReport,
    x0: f64,
    opts: &McOptions,
    stream: RandomStream,
) -> Result<ChainPath> {
    let mut rng = stream.rng();
    let mut states = vec![x0];
    let mut product = 1.0;
    let mut capped = false;
    let mut exit_index = 0;
    let mut x = x0;
    let mut steps = 0usize;
    while x <= 1.0 - opts.epsilon_stop {
        if steps >= opts.step_cap {
            capped = true;
            break;
        }
        let y = sample_step(config, report, x, &mut rng)?;
        product *= f_factor(config, report, x, y)?;
        states.push(y);
        if exit_index == 0 && y > config.x_star() {
            exit_index = states.len() - 1;
        }
        x = y;
        steps += 1;
    }
    Ok(ChainPath {
        states,
        exit_index,
        f_product: product,
        capped,
    })
}

/// Monte Carlo estimate of ρ(x) as the mean of ∏ F over independent paths.
/// Path `i` owns the derived stream `stream.substream(i)`, so the result
/// does not depend on the thread partition.
pub fn estimate_rho_mc(
    config: &ModelConfig,
    report: &ExponentReport,
    x: f64,
    n_paths: usize,
    stream: RandomStream,
    opts: &McOptions,
) -> Result<McEstimate> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!(
            "ρ estimate needs x ∈ (0, 1], got {x}"
        )));
    }
    if n_paths == 0 {
        return Err(Error::Domain("need at least one path".into()));
    }
    let results: Result<Vec<(f64, bool)>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i as u64).rng();
            run_rho_path(config, report, x, opts, &mut rng)
        })
        .collect();
    let results = results?;
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let capped = results.iter().filter(|r| r.1).count();
    let mean = stats::mean(&values);
    let std_error = if values.len() > 1 {
        stats::std_error(&values)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error,
        n_paths,
        capped,
    })
}

/// First index n with x_n > threshold, starting at x₀ = x < threshold.
pub fn simulate_exit(
    config: &ModelConfig,
    report: &ExponentReport,
    x: f64,
    threshold: f64,
    stream: RandomStream,
    step_cap: usize,
) -> Result<ExitSample> {
    if !(x > 0.0 && x < threshold && threshold < 1.0) {
        return Err(Error::Domain(format!(
            "exit simulation needs 0 < x < threshold < 1, got ({x}, {threshold})"
        )));
    }
    let mut rng = stream.rng();
    let mut cur = x;
    let mut steps = 0usize;
    while cur <= threshold {
        if steps >= step_cap {
            return Ok(ExitSample {
                steps,
                capped: true,
            });
        }
        cur = sample_step(config, report, cur, &mut rng)?;
        steps += 1;
    }
    Ok(ExitSample {
        steps,
        capped: false,
    })
}

/// Independent exit-time samples (parallel over paths).
pub fn simulate_exit_paths(
    config: &ModelConfig,
    report: &ExponentReport,
    x: f64,
    threshold: f64,
    n_paths: usize,
    stream: RandomStream,
    step_cap: usize,
) -> Result<Vec<ExitSample>> {
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            simulate_exit(
                config,
                report,
                x,
                threshold,
                stream.substream(i as u64),
                step_cap,
            )
        })
        .collect()
}

/// Mean log-increment at the switch point:
/// Y_* = (1/Z_α(x_*)) ∫₁^{1/x_*} ln s · s^α r(s) ds.
pub fn truncated_log_moment(kernel: &KernelSpec, alpha: f64, threshold: f64) -> Result<f64> {
    let z = kernel.z_mass(alpha, threshold)?;
    if !(z > 0.0) {
        return Err(Error::Precondition(format!(
            "no kernel mass below 1/{threshold}"
        )));
    }
    let upper = 1.0 / threshold;
    let breaks = kernel.breakpoints(1.0, upper);
    let raw = quad::integrate_split(
        |s: f64| s.ln() * s.powf(alpha) * kernel.density(s),
        &breaks,
        1e-11,
    )?
    .value;
    Ok(raw / z)
}

/// Deterministic exit-time bound: within N = ⌊(2/Y_*) ln(x_*/x)⌋ + 1 steps
/// the chain exits (x, x_*] with probability ≥ 1/(2 Y*(x)/Y_* − 1).
pub fn exit_time_bound(
    config: &ModelConfig,
    report: &ExponentReport,
    x: f64,
    threshold: f64,
) -> Result<ExitBound> {
    if !(x > 0.0 && x <= threshold && threshold <= config.x_star()) {
        return Err(Error::Domain(format!(
            "exit bound needs 0 < x ≤ threshold ≤ x_* = {}, got ({x}, {threshold})",
            config.x_star()
        )));
    }
    let y_star = truncated_log_moment(config.kernel(), report.alpha, threshold)?;
    if !(y_star > 0.0) {
        return Err(Error::Precondition(format!(
            "Y_* = {y_star} must be positive"
        )));
    }
    if x >= threshold * (1.0 - 1e-12) {
        // boundary start: the first step exits immediately
        return Ok(ExitBound {
            n_steps: 1,
            prob_bound: 1.0,
            y_star,
            y_upper: 0.0,
        });
    }
    let y_upper = (threshold / x).ln();
    let n_steps = (2.0 * y_upper / y_star).floor() as usize + 1;
    let denom = 2.0 * y_upper / y_star - 1.0;
    let prob_bound = if denom <= 1.0 { 1.0 } else { 1.0 / denom };
    Ok(ExitBound {
        n_steps,
        prob_bound,
        y_star,
        y_upper,
    })
}
