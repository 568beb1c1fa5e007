//! Empirical Pareto tail machinery: exact samplers, CCDF tables, exponent
//! fits, and the mixture/shadowing experiment.

use rand::Rng;

use crate::error::{Error, Result};
use crate::stats;
use crate::stochastic::RandomStream;

/// Minimum sample points inside a fit range.
pub const MIN_FIT_POINTS: usize = 30;

/// Default mid-range fit window (CCDF levels).  Shadowing fits depend on
/// the window, so every fit reports the window it used.
pub const DEFAULT_WINDOW: FitWindow = FitWindow::CcdfLevels { lo: 1e-3, hi: 1e-1 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Least-squares slope of log CCDF against log s.
    LoglogRegression,
    /// Hill estimator over the top-k order statistics.
    Hill,
}

/// Fit window, either directly in the sample domain or through CCDF levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow {
    SampleRange { lo: f64, hi: f64 },
    CcdfLevels { lo: f64, hi: f64 },
}

/// Empirical Pareto exponent estimate.
#[derive(Debug, Clone, Copy)]
pub struct TailFit {
    pub a_hat: f64,
    pub std_error: f64,
    /// Realized fit range in the sample domain.
    pub fit_range: (f64, f64),
    pub method: FitMethod,
    pub points: usize,
}

/// Inverse-CDF Pareto draws s = s_min · U^{−1/a}.
pub fn sample_pareto(a: f64, s_min: f64, n: usize, stream: RandomStream) -> Result<Vec<f64>> {
    if !(a > 0.0) || !(s_min > 0.0) {
        return Err(Error::Spec(format!(
            "Pareto sampler needs a > 0 and s_min > 0, got ({a}, {s_min})"
        )));
    }
    let mut rng = stream.rng();
    Ok((0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
            s_min * u.powf(-1.0 / a)
        })
        .collect())
}

/// Empirical CCDF points (s sorted ascending, Pr{X ≥ s} = rank share).
pub fn ccdf_points(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, (n - i as f64) / n))
        .collect()
}

/// Fit the tail exponent of positive samples inside a window.
pub fn fit_exponent(samples: &[f64], method: FitMethod, window: FitWindow) -> Result<TailFit> {
    if samples.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Domain(
            "tail fit needs strictly positive samples".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();

    let (s_lo, s_hi) = match window {
        FitWindow::SampleRange { lo, hi } => {
            if !(lo < hi) {
                return Err(Error::Spec(format!("empty fit range [{lo}, {hi}]")));
            }
            (lo, hi)
        }
        FitWindow::CcdfLevels { lo, hi } => {
            if !(lo < hi) || !(lo > 0.0) || hi > 1.0 {
                return Err(Error::Spec(format!("bad CCDF window [{lo}, {hi}]")));
            }
            // CCDF level p corresponds to the (1−p)-quantile
            let q = |p: f64| sorted[(((1.0 - p) * n as f64) as usize).min(n - 1)];
            (q(hi), q(lo))
        }
    };

    match method {
        FitMethod::LoglogRegression => {
            let mut lx = Vec::new();
            let mut ly = Vec::new();
            for (i, &s) in sorted.iter().enumerate() {
                if s >= s_lo && s <= s_hi && i < n - 1 {
                    lx.push(s.ln());
                    ly.push(((n - i) as f64 / n as f64).ln());
                }
            }
            if lx.len() < MIN_FIT_POINTS {
                return Err(Error::Precondition(format!(
                    "{} points inside the fit range; need ≥ {MIN_FIT_POINTS}",
                    lx.len()
                )));
            }
            let (slope, _, se) = stats::linear_fit(&lx, &ly);
            let a_hat = -slope;
            if !(a_hat > 0.0) {
                return Err(Error::Precondition(format!(
                    "non-positive exponent estimate {a_hat}"
                )));
            }
            Ok(TailFit {
                a_hat,
                std_error: se,
                fit_range: (s_lo, s_hi),
                method,
                points: lx.len(),
            })
        }
        FitMethod::Hill => {
            let k = sorted.iter().filter(|&&s| s > s_lo).count().min(n - 1);
            if k < MIN_FIT_POINTS {
                return Err(Error::Precondition(format!(
                    "Hill estimator got k = {k}; need ≥ {MIN_FIT_POINTS}"
                )));
            }
            let threshold = sorted[n - 1 - k];
            let sum_log: f64 = sorted[n - k..].iter().map(|&s| (s / threshold).ln()).sum();
            let a_hat = k as f64 / sum_log;
            Ok(TailFit {
                a_hat,
                std_error: a_hat / (k as f64).sqrt(),
                fit_range: (threshold, sorted[n - 1]),
                method,
                points: k,
            })
        }
    }
}

/// Two-component Pareto mixture sample: `share` of the points from the
/// heavier exponent `a1`, the rest from `a2`.
pub fn mixture_sample(
    a1: f64,
    a2: f64,
    share: f64,
    n: usize,
    stream: RandomStream,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&share) {
        return Err(Error::Spec(format!(
            "mixture share must lie in [0, 1], got {share}"
        )));
    }
    let n1 = (share * n as f64).round() as usize;
    let mut out = sample_pareto(a1, 1.0, n1, stream)?;
    out.extend(sample_pareto(a2, 1.0, n - n1, stream.substream(1))?);
    Ok(out)
}

/// Fit of a single mixture draw through the given window.
pub fn mixture_fit(
    a1: f64,
    a2: f64,
    share: f64,
    n: usize,
    window: FitWindow,
    stream: RandomStream,
) -> Result<TailFit> {
    let samples = mixture_sample(a1, a2, share, n, stream)?;
    fit_exponent(&samples, FitMethod::LoglogRegression, window)
}

/// Share sweep of the shadowing experiment.
#[derive(Debug, Clone)]
pub struct MixtureSweep {
    pub shares: Vec<f64>,
    pub fits: Vec<TailFit>,
    pub window: FitWindow,
}

/// Sweep the heavy-tail share over [0.05, 0.95] and fit each mixture with
/// the same window; a1 < a2 required (a1 is the heavier tail).
pub fn mixture_experiment(
    a1: f64,
    a2: f64,
    n: usize,
    window: FitWindow,
    stream: RandomStream,
) -> Result<MixtureSweep> {
    if !(a1 < a2) {
        return Err(Error::Spec(format!(
            "mixture needs a1 < a2, got ({a1}, {a2})"
        )));
    }
    let mut shares = Vec::new();
    let mut fits = Vec::new();
    for k in 1..=19 {
        let share = 0.05 * k as f64;
        shares.push(share);
        fits.push(mixture_fit(
            a1,
            a2,
            share,
            n,
            window,
            stream.substream(k as u64),
        )?);
    }
    Ok(MixtureSweep {
        shares,
        fits,
        window,
    })
}
