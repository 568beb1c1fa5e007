//! Model primitives — demand σ, pair-interaction kernel R, welfare P — and
//! the derived scalar functions (R₀, r, m_a, Z_α, C) consumed by the solver,
//! exponent, and chain modules.
//!
//! Scale conventions: the price scale fixes the minimal income at s₀ = 1, so
//! incomes live on s ∈ [1, ∞) and the reciprocal variable x = 1/s on (0, 1].
//! `c_small` is C(x)/R₀; with that normalization the fixed-point operator,
//! the chain weight F, and the bound Z_α(x) ≤ (1−x)c(x) are all exact
//! identities for every demand class.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Gamma};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::quad;

/// Hard bound on the minimal-income residual |1 − P(1) + σ(1)·R₀|.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Relative tolerance used for the scalar quadratures (moments, Z_α, C probes).
pub const QUAD_REL_TOL: f64 = 1e-11;

// ---------------------------------------------------------------------------
// Demand
// ---------------------------------------------------------------------------

/// Consumer demand function σ(s), σ(1) = 1.
#[derive(Debug, Clone, PartialEq)]
pub enum DemandSpec {
    /// σ(s) = s.
    Linear,
    /// Unbounded slowly varying demand; built-in form σ(s) = 1 + ln s.
    SlowlyVarying,
    /// Saturating demand σ(s) = S₀ s² / (s² + S₀ − 1) with σ(∞) = S₀ > 1.
    Sigmoidal { s0: f64 },
}

impl DemandSpec {
    pub fn sigmoidal(s0: f64) -> Result<Self> {
        if !(s0 > 1.0) || !s0.is_finite() {
            return Err(Error::Spec(format!(
                "sigmoidal saturation must satisfy S0 > 1, got {s0}"
            )));
        }
        Ok(DemandSpec::Sigmoidal { s0 })
    }

    /// σ(s) for s ≥ 1 (callers on the hot path guarantee the domain).
    pub fn value(&self, s: f64) -> f64 {
        debug_assert!(s >= 1.0);
        match self {
            DemandSpec::Linear => s,
            DemandSpec::SlowlyVarying => 1.0 + s.ln(),
            DemandSpec::Sigmoidal { s0 } => s0 * s * s / (s * s + (s0 - 1.0)),
        }
    }

    /// Checked σ(s); errors for s < 1.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 1.0) {
            return Err(Error::Domain(format!(
                "demand σ is defined on s ≥ 1, got {s}"
            )));
        }
        Ok(self.value(s))
    }

    /// σ′(s).
    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            DemandSpec::Linear => 1.0,
            DemandSpec::SlowlyVarying => 1.0 / s,
            DemandSpec::Sigmoidal { s0 } => {
                let k = s0 - 1.0;
                let den = s * s + k;
                2.0 * s0 * k * s / (den * den)
            }
        }
    }

    /// σ′(1), analytic for every built-in form.
    pub fn derivative_at_one(&self) -> f64 {
        self.derivative(1.0)
    }

    /// σ(∞): `Some(S0)` for the sigmoidal class, `None` when unbounded.
    pub fn saturation(&self) -> Option<f64> {
        match self {
            DemandSpec::Sigmoidal { s0 } => Some(*s0),
            _ => None,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            DemandSpec::Linear => "linear",
            DemandSpec::SlowlyVarying => "slowly_varying",
            DemandSpec::Sigmoidal { .. } => "sigmoidal",
        }
    }
}

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

/// Extrapolation rule beyond the last sample of a tabulated kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule {
    /// R ≡ 0 beyond s_max.
    Zero,
    /// R(s) = R(s_max)·exp(−rate·(s − s_max)).
    Exponential { rate: f64 },
    /// R(s) = R(s_max)·(s/s_max)^(−exponent).
    PowerLaw { exponent: f64 },
}

/// Pair-interaction intensity R(s/x) ≥ 0 for s ≥ x; price-invariant.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    /// R(s) = λ e^{−λ(s−1)}; R₀ = 1 exactly.
    Exponential {
        lambda: f64,
    },
    Tabulated(TabulatedKernel),
}

/// Piecewise-linear samples of R on [1, s_max] plus a tail rule.
#[derive(Debug, Clone)]
pub struct TabulatedKernel {
    s: Vec<f64>,
    v: Vec<f64>,
    tail: TailRule,
    r0: f64,
}

impl KernelSpec {
    pub fn exponential(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Spec(format!(
                "exponential kernel needs λ > 0, got {lambda}"
            )));
        }
        Ok(KernelSpec::Exponential { lambda })
    }

    pub fn tabulated(s: Vec<f64>, v: Vec<f64>, tail: TailRule) -> Result<Self> {
        if s.len() != v.len() || s.len() < 2 {
            return Err(Error::Spec(
                "tabulated kernel needs ≥ 2 matched samples".into(),
            ));
        }
        if (s[0] - 1.0).abs() > 1e-12 {
            return Err(Error::Spec(
                "tabulated kernel samples must start at s = 1".into(),
            ));
        }
        if !s.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Spec(
                "tabulated kernel abscissae must be strictly increasing".into(),
            ));
        }
        if v.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::Spec(
                "tabulated kernel values must be finite and ≥ 0".into(),
            ));
        }
        if v[0] <= 0.0 {
            return Err(Error::Spec("kernel must satisfy R(1) > 0".into()));
        }
        match tail {
            TailRule::Exponential { rate } if !(rate > 0.0) => {
                return Err(Error::Spec("exponential tail rule needs rate > 0".into()))
            }
            TailRule::PowerLaw { exponent } if !(exponent > 1.0) => {
                return Err(Error::Divergent(format!(
                    "power tail with exponent {exponent} ≤ 1 has infinite total intensity"
                )))
            }
            _ => {}
        }
        let mut body = 0.0;
        for w in s.windows(2).zip(v.windows(2)) {
            body += 0.5 * (w.0[1] - w.0[0]) * (w.1[0] + w.1[1]);
        }
        let s_max = *s.last().unwrap();
        let r_max = *v.last().unwrap();
        let tail_mass = match tail {
            TailRule::Zero => 0.0,
            TailRule::Exponential { rate } => r_max / rate,
            TailRule::PowerLaw { exponent } => r_max * s_max / (exponent - 1.0),
        };
        let r0 = body + tail_mass;
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::Divergent(
                "tabulated kernel has non-finite R0".into(),
            ));
        }
        Ok(KernelSpec::Tabulated(TabulatedKernel { s, v, tail, r0 }))
    }

    /// Unnormalized intensity R(s); zero below s = 1.
    pub fn big_r(&self, s: f64) -> f64 {
        if s < 1.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Exponential { lambda } => lambda * (-lambda * (s - 1.0)).exp(),
            KernelSpec::Tabulated(t) => t.value(s),
        }
    }

    /// Total intensity R₀ = ∫₁^∞ R; closed form for the exponential family,
    /// exact piecewise integral plus tail for tabulated kernels.
    pub fn r0(&self) -> f64 {
        match self {
            KernelSpec::Exponential { .. } => 1.0,
            KernelSpec::Tabulated(t) => t.r0,
        }
    }

    /// Normalized density r(s) = R(s)/R₀ (a probability density on [1, ∞)).
    pub fn density(&self, s: f64) -> f64 {
        self.big_r(s) / self.r0()
    }

    /// Largest a for which m_a is finite (exclusive bound; ∞ when all
    /// moments exist).
    pub fn moment_divergence_threshold(&self) -> f64 {
        match self {
            KernelSpec::Exponential { .. } => f64::INFINITY,
            KernelSpec::Tabulated(t) => match t.tail {
                TailRule::Zero | TailRule::Exponential { .. } => f64::INFINITY,
                TailRule::PowerLaw { exponent } => exponent - 1.0,
            },
        }
    }

    /// m_a = ∫₁^∞ s^a r(s) ds by adaptive quadrature (1/s substitution for
    /// the unbounded tail).  Divergent moments are signalled, not returned.
    pub fn moment(&self, a: f64) -> Result<f64> {
        let threshold = self.moment_divergence_threshold();
        if a >= threshold {
            return Err(Error::DivergentMoment { a, threshold });
        }
        let f = |s: f64| s.powf(a) * self.density(s);
        let cut = self.body_cut(a);
        let breaks = self.breakpoints(1.0, cut);
        let body = quad::integrate_split(f, &breaks, QUAD_REL_TOL)?;
        let tail = match self {
            // cut is placed where the remaining exponential mass is below
            // 1e-15 relative; skip the fragile near-zero chase
            KernelSpec::Exponential { .. } => 0.0,
            KernelSpec::Tabulated(t) => match t.tail {
                TailRule::Zero => 0.0,
                _ => {
                    quad::integrate_to_inf_with_floor(
                        f,
                        cut,
                        QUAD_REL_TOL,
                        1e-13 * body.value.abs(),
                    )?
                    .value
                }
            },
        };
        Ok(body.value + tail)
    }

    /// ∫₁^∞ r(s) ln s ds, the first-order scale of Remark-style expansions.
    pub fn log_moment(&self) -> Result<f64> {
        let f = |s: f64| s.ln() * self.density(s);
        let cut = self.body_cut(0.0);
        let breaks = self.breakpoints(1.0, cut);
        let body = quad::integrate_split(f, &breaks, QUAD_REL_TOL)?;
        let tail = match self {
            KernelSpec::Exponential { .. } => 0.0,
            KernelSpec::Tabulated(t) => match t.tail {
                TailRule::Zero => 0.0,
                _ => {
                    quad::integrate_to_inf_with_floor(
                        f,
                        cut,
                        QUAD_REL_TOL,
                        1e-13 * body.value.abs(),
                    )?
                    .value
                }
            },
        };
        let value = body.value + tail;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Divergent("log-moment of kernel density".into()));
        }
        Ok(value)
    }

    /// Exact truncated moment Z_α(x) = ∫₁^{1/x} s^α r(s) ds (closed forms:
    /// incomplete-gamma for the exponential family, piecewise power
    /// integrals for tabulated kernels).  Hot path of the chain sampler.
    pub fn z_mass(&self, alpha: f64, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("Z_α needs x ∈ (0, 1], got {x}")));
        }
        if x == 1.0 {
            return Ok(0.0);
        }
        let upper = 1.0 / x;
        match self {
            KernelSpec::Exponential { lambda } => Ok(exp_weighted_mass(*lambda, alpha, 1.0, upper)),
            KernelSpec::Tabulated(t) => Ok(t.weighted_mass(alpha, upper) / t.r0),
        }
    }

    /// Draw ξ ∈ [1, 1/x] with density s^α r(s)/Z_α(x).
    pub fn sample_truncated<R: Rng + ?Sized>(&self, alpha: f64, x: f64, rng: &mut R) -> f64 {
        let upper = 1.0 / x;
        let u = open_unit(rng);
        match self {
            KernelSpec::Exponential { lambda } => {
                if alpha == 0.0 {
                    // inverse CDF of the truncated exponential shift
                    let z = -(-lambda * (upper - 1.0)).exp_m1();
                    1.0 - (-u * z).ln_1p() / lambda
                } else if upper - 1.0 < 1e-9 {
                    1.0 + u * (upper - 1.0)
                } else {
                    let g = Gamma::new(alpha + 1.0, *lambda).expect("valid gamma");
                    let lo = g.cdf(1.0);
                    let hi = g.cdf(upper);
                    if hi - lo <= 0.0 {
                        return 1.0 + u * (upper - 1.0);
                    }
                    g.inverse_cdf(lo + u * (hi - lo)).clamp(1.0, upper)
                }
            }
            KernelSpec::Tabulated(t) => t.sample_truncated(alpha, upper, u),
        }
    }

    /// Characteristic width over which R varies; drives quadrature panels.
    pub fn resolution_scale(&self) -> f64 {
        match self {
            KernelSpec::Exponential { lambda } => 1.0 / lambda,
            KernelSpec::Tabulated(t) => {
                let seg =
                    t.s.windows(2)
                        .map(|w| w[1] - w[0])
                        .fold(f64::INFINITY, f64::min);
                match t.tail {
                    TailRule::Exponential { rate } => seg.min(1.0 / rate),
                    _ => seg,
                }
            }
        }
    }

    /// Point beyond which the remaining s^α-weighted mass is below `eps`
    /// (absolute).  `INFINITY` when no cheap cutoff exists (power tails).
    pub fn tail_cutoff(&self, alpha: f64, eps: f64) -> f64 {
        match self {
            KernelSpec::Exponential { lambda } => {
                let mut y = 1.0 + 10.0 / lambda;
                while exp_weighted_upper_mass(*lambda, alpha, y) > eps && y < 1e8 {
                    y *= 2.0;
                }
                y
            }
            KernelSpec::Tabulated(t) => {
                let s_max = *t.s.last().unwrap();
                match t.tail {
                    TailRule::Zero => s_max,
                    TailRule::PowerLaw { .. } => f64::INFINITY,
                    TailRule::Exponential { rate } => {
                        let r_max = *t.v.last().unwrap();
                        let mut y = s_max + 10.0 / rate;
                        let mass = |y: f64| {
                            r_max
                                * (rate * s_max - (alpha + 1.0) * rate.ln() + ln_gamma(alpha + 1.0))
                                    .exp()
                                * gamma_ur(alpha + 1.0, rate * y)
                                / t.r0
                        };
                        while mass(y) > eps && y < 1e8 {
                            y *= 2.0;
                        }
                        y
                    }
                }
            }
        }
    }

    /// Interior breakpoints for piecewise-smooth integration of r over
    /// [lo, hi] (sample kinks for tabulated kernels, decay-scale panels for
    /// exponential ones).
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            KernelSpec::Exponential { .. } => {
                quad::scaled_breakpoints(lo, hi, self.resolution_scale())
            }
            KernelSpec::Tabulated(t) => {
                let s_last = *t.s.last().unwrap();
                let mut b = vec![lo];
                for &si in &t.s {
                    if si > lo && si < hi {
                        b.push(si);
                    }
                }
                if hi > s_last {
                    let mut geo =
                        quad::scaled_breakpoints(s_last.max(lo), hi, self.resolution_scale());
                    b.append(&mut geo);
                    b.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    b.dedup();
                } else {
                    b.push(hi);
                }
                b
            }
        }
    }

    fn body_cut(&self, a: f64) -> f64 {
        match self {
            KernelSpec::Exponential { lambda } => 1.0 + (30.0 + 6.0 * a.max(0.0)) / lambda,
            KernelSpec::Tabulated(t) => *t.s.last().unwrap(),
        }
    }
}

/// ∫_lo^hi s^α λe^{−λ(s−1)} ds via regularized incomplete gamma.
fn exp_weighted_mass(lambda: f64, alpha: f64, lo: f64, hi: f64) -> f64 {
    if alpha == 0.0 {
        return (-lambda * (lo - 1.0)).exp() - (-lambda * (hi - 1.0)).exp();
    }
    let a = alpha + 1.0;
    let coef = (lambda - alpha * lambda.ln() + ln_gamma(a)).exp();
    coef * (gamma_lr(a, lambda * hi) - gamma_lr(a, lambda * lo))
}

fn exp_weighted_upper_mass(lambda: f64, alpha: f64, y: f64) -> f64 {
    let a = alpha + 1.0;
    let coef = (lambda - alpha * lambda.ln() + ln_gamma(a)).exp();
    coef * gamma_ur(a, lambda * y)
}

/// Uniform draw on the open interval (0, 1).
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

impl TabulatedKernel {
    fn value(&self, s: f64) -> f64 {
        let s_max = *self.s.last().unwrap();
        if s <= s_max {
            let i = match self.s.binary_search_by(|p| p.partial_cmp(&s).unwrap()) {
                Ok(i) => return self.v[i],
                Err(i) => i - 1,
            };
            let t = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
            self.v[i] * (1.0 - t) + self.v[i + 1] * t
        } else {
            let r_max = *self.v.last().unwrap();
            match self.tail {
                TailRule::Zero => 0.0,
                TailRule::Exponential { rate } => r_max * (-rate * (s - s_max)).exp(),
                TailRule::PowerLaw { exponent } => r_max * (s / s_max).powf(-exponent),
            }
        }
    }

    /// Exact ∫_1^upper s^α R(s) ds (unnormalized).
    fn weighted_mass(&self, alpha: f64, upper: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.s.len() - 1 {
            let (a, b) = (self.s[i], self.s[i + 1]);
            if a >= upper {
                break;
            }
            let hi = b.min(upper);
            total += segment_power_integral(a, hi, self.v[i], self.v[i + 1], a, b, alpha);
        }
        let s_max = *self.s.last().unwrap();
        if upper > s_max {
            let r_max = *self.v.last().unwrap();
            total += match self.tail {
                TailRule::Zero => 0.0,
                TailRule::Exponential { rate } => {
                    r_max
                        * (rate * s_max - (alpha + 1.0) * rate.ln() + ln_gamma(alpha + 1.0)).exp()
                        * (gamma_lr(alpha + 1.0, rate * upper)
                            - gamma_lr(alpha + 1.0, rate * s_max))
                }
                TailRule::PowerLaw { exponent } => {
                    let q = alpha - exponent + 1.0;
                    if q.abs() < 1e-14 {
                        r_max * s_max.powf(exponent) * (upper / s_max).ln()
                    } else {
                        r_max * s_max.powf(exponent) * (upper.powf(q) - s_max.powf(q)) / q
                    }
                }
            };
        }
        total
    }

    /// Inverse-CDF draw on [1, upper] by monotone bisection of the exact
    /// weighted cumulative.
    fn sample_truncated(&self, alpha: f64, upper: f64, u: f64) -> f64 {
        let total = self.weighted_mass(alpha, upper);
        if total <= 0.0 {
            return 1.0 + u * (upper - 1.0);
        }
        let target = u * total;
        let mut lo = 1.0;
        let mut hi = upper;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.weighted_mass(alpha, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// ∫_lo^hi s^α · (linear interpolant of (ra, rb) over [a, b]) ds, exact.
fn segment_power_integral(lo: f64, hi: f64, ra: f64, rb: f64, a: f64, b: f64, alpha: f64) -> f64 {
    // R(s) = m·s + c on [a, b]
    let m = (rb - ra) / (b - a);
    let c = ra - m * a;
    let p1 = alpha + 1.0;
    let p2 = alpha + 2.0;
    m * (hi.powf(p2) - lo.powf(p2)) / p2 + c * (hi.powf(p1) - lo.powf(p1)) / p1
}

// ---------------------------------------------------------------------------
// Welfare
// ---------------------------------------------------------------------------

/// Exogenous bottom-of-hierarchy income P(s/s₀), nonincreasing, eventually 0.
#[derive(Debug, Clone, PartialEq)]
pub enum WelfareSpec {
    /// P(s) = 2/(1+(s−1)³), clamped to exactly 0 beyond s_cut.
    RationalDefault { s_cut: f64 },
    /// Linear ramp P(s) = amplitude·(1 − (s−1)/(s_cut−1)) on [1, s_cut].
    /// `amplitude = None` resolves to the consistent value 1 + σ(1)·R₀.
    ZeroBeyondCutoff { amplitude: Option<f64>, s_cut: f64 },
    /// Piecewise-linear samples on [1, s_last]; 0 beyond.
    UserTabulated { s: Vec<f64>, p: Vec<f64> },
}

impl WelfareSpec {
    /// Default rational welfare with the cutoff placed where P < 1e−12, so
    /// the clamp to exact zero is numerically invisible.
    pub fn rational_default() -> Self {
        let s_cut = 1.0 + (2e12_f64 - 1.0).cbrt();
        WelfareSpec::RationalDefault { s_cut }
    }

    pub fn ramp(amplitude: Option<f64>, s_cut: f64) -> Result<Self> {
        if !(s_cut > 1.0) {
            return Err(Error::Spec(format!(
                "welfare cutoff must exceed 1, got {s_cut}"
            )));
        }
        if let Some(a) = amplitude {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::Spec(format!(
                    "welfare amplitude must be ≥ 0, got {a}"
                )));
            }
        }
        Ok(WelfareSpec::ZeroBeyondCutoff { amplitude, s_cut })
    }

    pub fn tabulated(s: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if s.len() != p.len() || s.len() < 2 {
            return Err(Error::Spec(
                "tabulated welfare needs ≥ 2 matched samples".into(),
            ));
        }
        if (s[0] - 1.0).abs() > 1e-12 || !s.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Spec(
                "welfare abscissae must start at 1 and increase".into(),
            ));
        }
        if p.iter().any(|&x| !(x >= 0.0)) || !p.windows(2).all(|w| w[1] <= w[0]) {
            return Err(Error::Spec(
                "welfare must be nonnegative and nonincreasing".into(),
            ));
        }
        Ok(WelfareSpec::UserTabulated { s, p })
    }

    /// P(s) for s ≥ 1; exactly 0 beyond the cutoff.
    pub fn value(&self, s: f64) -> f64 {
        match self {
            WelfareSpec::RationalDefault { s_cut } => {
                if s >= *s_cut {
                    0.0
                } else {
                    let d = s - 1.0;
                    2.0 / (1.0 + d * d * d)
                }
            }
            WelfareSpec::ZeroBeyondCutoff { amplitude, s_cut } => {
                let a = amplitude.expect("welfare amplitude resolved by ModelConfig");
                if s >= *s_cut {
                    0.0
                } else {
                    a * (1.0 - (s - 1.0) / (s_cut - 1.0))
                }
            }
            WelfareSpec::UserTabulated { s: xs, p } => {
                if s >= *xs.last().unwrap() {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v <= s).saturating_sub(1);
                let t = (s - xs[i]) / (xs[i + 1] - xs[i]);
                p[i] * (1.0 - t) + p[i + 1] * t
            }
        }
    }

    /// One-sided P′(1⁺); ≤ 0 for every admissible form.
    pub fn derivative_at_one(&self) -> f64 {
        match self {
            WelfareSpec::RationalDefault { .. } => 0.0,
            WelfareSpec::ZeroBeyondCutoff { amplitude, s_cut } => {
                -amplitude.expect("resolved amplitude") / (s_cut - 1.0)
            }
            WelfareSpec::UserTabulated { s, p } => (p[1] - p[0]) / (s[1] - s[0]),
        }
    }

    fn resolve(&mut self, consistent_amplitude: f64) {
        if let WelfareSpec::ZeroBeyondCutoff { amplitude, .. } = self {
            if amplitude.is_none() {
                *amplitude = Some(consistent_amplitude);
            }
        }
    }

    /// Smallest s with P(s) = 0 exactly.
    pub fn support_end(&self) -> f64 {
        match self {
            WelfareSpec::RationalDefault { s_cut } => *s_cut,
            WelfareSpec::ZeroBeyondCutoff { s_cut, .. } => *s_cut,
            WelfareSpec::UserTabulated { s, .. } => *s.last().unwrap(),
        }
    }
}

// ---------------------------------------------------------------------------
// Model config
// ---------------------------------------------------------------------------

/// One model instance: demand class, interaction kernel, welfare, switch
/// point.  Construction validates the minimal-income consistency
/// 1 − P(1) + σ(1)·R₀ = 0 and caches the C limits.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    demand: DemandSpec,
    kernel: KernelSpec,
    welfare: WelfareSpec,
    x_star: f64,
    r0: f64,
    c_at_zero: f64,
    c_at_one: f64,
    minimal_residual: f64,
}

impl ModelConfig {
    pub fn new(
        demand: DemandSpec,
        kernel: KernelSpec,
        mut welfare: WelfareSpec,
        x_star: f64,
    ) -> Result<Self> {
        if !(x_star > 0.0 && x_star < 1.0) {
            return Err(Error::Spec(format!(
                "switch point must lie in (0, 1), got {x_star}"
            )));
        }
        let r0 = kernel.r0();
        welfare.resolve(1.0 + r0);
        let minimal_residual = (1.0 - welfare.value(1.0) + r0).abs();
        if minimal_residual > CONSISTENCY_TOL {
            return Err(Error::Inconsistent {
                residual: minimal_residual,
                tol: CONSISTENCY_TOL,
            });
        }
        let c_at_zero = r0 + demand.saturation().map_or(0.0, |s0| 1.0 / s0);
        let c_at_one = 1.0 - welfare.derivative_at_one() + r0 * (1.0 + demand.derivative_at_one());
        if !(c_at_one > 0.0) {
            return Err(Error::Spec(format!("C(1) = {c_at_one} must be positive")));
        }
        Ok(ModelConfig {
            demand,
            kernel,
            welfare,
            x_star,
            r0,
            c_at_zero,
            c_at_one,
            minimal_residual,
        })
    }

    pub fn demand(&self) -> &DemandSpec {
        &self.demand
    }
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }
    pub fn welfare(&self) -> &WelfareSpec {
        &self.welfare
    }
    pub fn x_star(&self) -> f64 {
        self.x_star
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn minimal_residual(&self) -> f64 {
        self.minimal_residual
    }

    /// C(x) from the factorized balance identity
    /// s − P(s) + s σ(s) R₀ = σ(s)(s−1) C(1/s): the interior formula on
    /// (0, 1), the limit R₀ + 1/σ(∞) at 0, and the L'Hôpital limit
    /// 1 − P′(1) + R₀(1 + σ′(1)) at 1.
    pub fn c_big(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("C is defined on [0, 1], got {x}")));
        }
        if x == 0.0 {
            return Ok(self.c_at_zero);
        }
        if 1.0 - x < 1e-12 {
            return Ok(self.c_at_one);
        }
        let s = 1.0 / x;
        let sigma = self.demand.value(s);
        Ok((s - self.welfare.value(s) + s * sigma * self.r0) / (sigma * (s - 1.0)))
    }

    /// c(x) = C(x)/R₀.  With this normalization c(0) equals the moment
    /// target m_α (1 for linear and slowly varying demand) and
    /// d + 1 = r(1)/c(1) exactly.
    pub fn c_small(&self, x: f64) -> Result<f64> {
        Ok(self.c_big(x)? / self.r0)
    }

    /// C(0) limit.
    pub fn c_at_zero(&self) -> f64 {
        self.c_at_zero
    }

    /// C(1) limit.
    pub fn c_at_one(&self) -> f64 {
        self.c_at_one
    }

    /// inf of c(x) over a dense probe grid of (0, 1].
    pub fn c_star(&self, n_probe: usize) -> f64 {
        probe_grid(n_probe)
            .into_iter()
            .map(|x| self.c_small(x).expect("probe in domain"))
            .fold(f64::INFINITY, f64::min)
    }

    /// Z_α(x) = ∫₁^{1/x} s^α r(s) ds by adaptive quadrature.  The closed
    /// forms in [`KernelSpec::z_mass`] are the fast route; this is the
    /// independent one.
    pub fn z_alpha(&self, alpha: f64, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("Z_α needs x ∈ (0, 1], got {x}")));
        }
        if x == 1.0 {
            return Ok(0.0);
        }
        let upper = 1.0 / x;
        let f = |s: f64| s.powf(alpha) * self.kernel.density(s);
        let breaks = self.kernel.breakpoints(1.0, upper);
        Ok(quad::integrate_split(f, &breaks, QUAD_REL_TOL)?.value)
    }

    /// m_a of the kernel density (checked divergence).
    pub fn moment(&self, a: f64) -> Result<f64> {
        self.kernel.moment(a)
    }

    /// Gaps in the footnote assumptions at the declared switch point:
    /// (max_{s ≤ 1/x*} |σ(s) − s|, P(1/x*)).  Advisory diagnostics — the
    /// default welfare and the saturating demand do not satisfy them
    /// exactly, and no downstream identity depends on them.
    pub fn assumption_gaps(&self) -> (f64, f64) {
        let s_hi = 1.0 / self.x_star;
        let sigma_gap = (0..=64)
            .map(|i| 1.0 + (s_hi - 1.0) * i as f64 / 64.0)
            .map(|s| (self.demand.value(s) - s).abs())
            .fold(0.0, f64::max);
        (sigma_gap, self.welfare.value(s_hi))
    }
}

/// Probe grid on (0, 1]: geometric sweep of 1e-6..0.1, linear through the bulk.
pub fn probe_grid(n: usize) -> Vec<f64> {
    let n_geo = (n / 4).max(8);
    let mut xs = Vec::with_capacity(n + n_geo);
    for i in 0..n_geo {
        let t = i as f64 / (n_geo - 1) as f64;
        xs.push(1e-6 * 1e5_f64.powf(t));
    }
    for i in 1..=n {
        xs.push(0.1 + 0.9 * i as f64 / n as f64);
    }
    xs.retain(|&x| x > 0.0 && x <= 1.0);
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}
