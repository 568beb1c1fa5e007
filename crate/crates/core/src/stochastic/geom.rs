//! Random geometric progressions G = Σ_n ∏_{k≤n} ξ_k with i.i.d. factors
//! in [0, 1): moment recurrences, the exponential-moment criterion σ(λ),
//! and the sufficiency threshold on the boundary exponent.
//!
//! Two moment recurrences are carried side by side.  The corrected one,
//!     M_n = μ_n/(1−μ_n) · Σ_{k<n} C(n,k) M_k,
//! follows from G = ξ(1 + G̃) by coefficient matching and reproduces
//! M₁ = μ₁/(1−μ₁) and Monte Carlo; the majorant drops the leading μ_n
//! factor and is the form the sufficiency bound for exponential moments is
//! stated through (valid as an upper bound since μ_n < 1).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Factor law of the progression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeomProgSpec {
    /// ξ ~ Beta(γ, 1): density γ t^{γ−1} on (0, 1), μ_n = γ/(γ+n).
    Beta { gamma: f64 },
    /// Degenerate factor ξ ≡ c ∈ [0, 1): μ_n = c^n.
    Constant { c: f64 },
}

impl GeomProgSpec {
    pub fn beta(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Spec(format!("Beta factor needs γ > 0, got {gamma}")));
        }
        Ok(GeomProgSpec::Beta { gamma })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&c) {
            return Err(Error::Spec(format!(
                "constant factor needs c ∈ [0, 1), got {c}"
            )));
        }
        Ok(GeomProgSpec::Constant { c })
    }

    /// μ_n = E ξ^n for n ≥ 1 (nonincreasing in n for factors in [0, 1]).
    pub fn mu(&self, n: usize) -> f64 {
        match self {
            GeomProgSpec::Beta { gamma } => gamma / (gamma + n as f64),
            GeomProgSpec::Constant { c } => c.powi(n as i32),
        }
    }

    pub fn sample_factor(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            GeomProgSpec::Beta { gamma } => {
                let u: f64 = loop {
                    let v: f64 = rng.gen();
                    if v > 0.0 {
                        break v;
                    }
                };
                u.powf(1.0 / gamma)
            }
            GeomProgSpec::Constant { c } => *c,
        }
    }
}

/// Moments M₁..M_N of G by both recurrences (index 0 holds M₀ = 1).
#[derive(Debug, Clone)]
pub struct GeomMoments {
    pub corrected: Vec<f64>,
    pub majorant: Vec<f64>,
}

pub fn geom_moments(spec: &GeomProgSpec, n_max: usize) -> Result<GeomMoments> {
    let mut corrected = vec![1.0];
    let mut majorant = vec![1.0];
    // Pascal row C(n, k)
    let mut binom = vec![1.0_f64];
    for n in 1..=n_max {
        binom.push(1.0);
        for k in (1..n).rev() {
            binom[k] += binom[k - 1];
        }
        let mu = spec.mu(n);
        if mu >= 1.0 {
            return Err(Error::Precondition(format!(
                "μ_{n} = {mu} ≥ 1; moments undefined"
            )));
        }
        let sum_c: f64 = (0..n).map(|k| binom[k] * corrected[k]).sum();
        let sum_m: f64 = (0..n).map(|k| binom[k] * majorant[k]).sum();
        corrected.push(mu / (1.0 - mu) * sum_c);
        majorant.push(sum_m / (1.0 - mu));
    }
    Ok(GeomMoments {
        corrected,
        majorant,
    })
}

/// One draw of G truncated once the running product falls below `trunc_tol`
/// (geometric truncation; the discarded tail is below trunc_tol/(1−μ₁)).
pub fn sample_progression(spec: &GeomProgSpec, rng: &mut ChaCha8Rng, trunc_tol: f64) -> f64 {
    let mut product = 1.0;
    let mut sum = 0.0;
    for _ in 0..100_000 {
        product *= spec.sample_factor(rng);
        sum += product;
        if product < trunc_tol {
            break;
        }
    }
    sum
}

/// σ(λ) = sup_{k≥1} Σ_{n≥1} λⁿ/n! · 1/(1−μ_{n+k}), evaluated until the
/// series remainder is below 1e−12.  Exponential moments of G are finite
/// whenever σ(λ) < 1.
pub fn sigma_lambda(spec: &GeomProgSpec, lambda: f64, max_terms: usize) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("σ(λ) needs λ ≥ 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut sup = 0.0_f64;
    // μ_n is nonincreasing for both factor families, so k = 1 attains the
    // sup; a few more k are probed anyway since they are cheap.
    for k in 1..=4_usize {
        let mut partial = 0.0;
        let mut term = 1.0; // λ^n / n!
        let mut reached = false;
        for n in 1..=max_terms {
            term *= lambda / n as f64;
            partial += term / (1.0 - spec.mu(n + k));
            // remainder bound: (e^λ − Σ_{m≤n} λ^m/m!) / (1 − μ_{n+k+1})
            let mut series_head = 1.0;
            let mut t = 1.0;
            for m in 1..=n {
                t *= lambda / m as f64;
                series_head += t;
            }
            let tail = (lambda.exp() - series_head) / (1.0 - spec.mu(n + k + 1));
            if tail < 1e-12 {
                reached = true;
                break;
            }
        }
        if !reached {
            return Err(Error::Divergent(format!(
                "σ(λ) series did not settle within {max_terms} terms at λ = {lambda}"
            )));
        }
        sup = sup.max(partial);
    }
    Ok(sup)
}

/// Largest admissible d + 1 for the exponential-moment sufficiency at a
/// given F*: γ_max = F*(2 − e^{F*})/(e^{F*} − 1 − F*).  Returns the value
/// and a flag marking the condition void (F* ≥ ln 2 → 0).
pub fn exp_moment_gamma_max(f_star: f64) -> Result<(f64, bool)> {
    if !(f_star > 0.0) {
        return Err(Error::Domain(format!("γ_max needs F* > 0, got {f_star}")));
    }
    if f_star >= std::f64::consts::LN_2 {
        return Ok((0.0, true));
    }
    let e = f_star.exp();
    Ok((f_star * (2.0 - e) / (e - 1.0 - f_star), false))
}
