//! Adaptive Gauss–Kronrod quadrature.
//!
//! Finite intervals use a 15-point Kronrod rule with the embedded 7-point
//! Gauss estimate for the local error; the worst interval is bisected until
//! the global error target is met.  Semi-infinite upper limits are handled
//! by the substitution t = 1/s.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae (positive half, descending) for the (G7, K15) pair.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_45,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_92,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Single (G7, K15) application on [a, b]: returns (value, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut res_abs = WGK[7] * f_center.abs();
    let mut fv = [0.0_f64; 15];
    fv[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > err {
            err = min_err;
        }
    }
    (value, err)
}

const MAX_INTERVALS: usize = 4000;

/// Integrate `f` over the finite interval [a, b] to relative tolerance
/// `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quadrature> {
    integrate_with_floor(f, a, b, rel_tol, 1e-300)
}

/// Like [`integrate`], but accepts once the absolute error is below
/// `abs_floor` even if the relative target is out of reach (used for tail
/// pieces that are negligible against an already-computed body).
pub fn integrate_with_floor<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }

    let (v, e) = qk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total_value = v;
    let mut total_error = e;

    while total_error > (rel_tol * total_value.abs()).max(abs_floor) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                err: total_error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval too small to bisect in f64
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    Ok(Quadrature {
        value: total_value,
        abs_error: total_error,
    })
}

/// Integrate `f` over [a, ∞) with the substitution t = 1/s (a > 0).
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<Quadrature> {
    integrate_to_inf_with_floor(f, a, rel_tol, 1e-300)
}

/// Semi-infinite version of [`integrate_with_floor`].
pub fn integrate_to_inf_with_floor<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<Quadrature> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!(
            "semi-infinite integral needs a > 0, got {a}"
        )));
    }
    integrate_with_floor(|t| f(1.0 / t) / (t * t), 0.0, 1.0 / a, rel_tol, abs_floor)
}

/// Integrate over [a, b] after pre-splitting at the given interior
/// breakpoints.  Used when the integrand has localized mass that a single
/// top-level Kronrod application could miss entirely.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
) -> Result<Quadrature> {
    integrate_split_with_floor(f, breaks, rel_tol, 1e-300)
}

/// Pre-split integration with a per-window absolute error floor: windows
/// whose contribution is below the floor are accepted immediately instead
/// of being refined relative to their own (negligible) value.
pub fn integrate_split_with_floor<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_floor: f64,
) -> Result<Quadrature> {
    let mut value = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let q = integrate_with_floor(&f, w[0], w[1], rel_tol, abs_floor)?;
        value += q.value;
        err += q.abs_error;
    }
    Ok(Quadrature {
        value,
        abs_error: err,
    })
}

/// Geometric breakpoints 1 = b0 < b1 < … covering [lo, hi], starting with
/// linear steps of width `scale` and doubling afterwards.
pub fn scaled_breakpoints(lo: f64, hi: f64, scale: f64) -> Vec<f64> {
    let mut breaks = vec![lo];
    let mut step = scale.max((hi - lo) * 1e-12);
    let mut cur = lo;
    while cur + step < hi {
        cur += step;
        breaks.push(cur);
        if breaks.len() > 6 {
            step *= 2.0;
        }
        if breaks.len() > 200 {
            break;
        }
    }
    breaks.push(hi);
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(q.value, 8.0, max_relative = 1e-13);
    }

    #[test]
    fn exponential_tail_via_substitution() {
        let q = integrate_to_inf(|s| (-(s - 1.0)).exp(), 1.0, 1e-12).unwrap();
        assert_relative_eq!(q.value, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn localized_mass_found_with_presplit() {
        // exp(-30(s-1)) on [1, 1e4]: a single K15 on the full interval would
        // see almost nothing; the split finds the mass.
        let breaks = scaled_breakpoints(1.0, 1e4, 1.0 / 30.0);
        let q = integrate_split(|s| 30.0 * (-30.0 * (s - 1.0)).exp(), &breaks, 1e-12).unwrap();
        assert_relative_eq!(q.value, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let q = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(q.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn empty_interval_is_zero() {
        let q = integrate(|x| x, 3.0, 3.0, 1e-12).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn reversed_interval_rejected() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-12).is_err());
    }
}
