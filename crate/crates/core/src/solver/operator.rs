//! Collocation discretization of the fixed-point operator
//!
//!   (Aρ)(x) = 1/(x(1−x)c(x)) ∫ₓ¹ (z/x)^α ((1−z)/(1−x))^d r(z/x) ρ(z) dz
//!
//! on a [`Grid`], with ρ interpolated piecewise-linearly between nodes.
//!
//! Quadrature layout per output node x:
//! * near the right endpoint the (1−z)^d factor is singular for d < 0, so
//!   the smooth part of the integrand is linearized per grid segment and
//!   integrated against the exact local moments of (1−z)^d;
//! * for x ≤ x_star the substitution y = z/x is used instead (the kernel
//!   mass concentrates within a few decay lengths of z = x, far below the
//!   grid resolution), with Gauss–Legendre panels laid out on the kernel's
//!   own scale and broken at the images of the grid nodes.
//!
//! Every row only references nodes to its right, so the matrix is upper
//! triangular and restricting the grid restricts the operator.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::ExponentReport;
use crate::model::ModelConfig;

use super::grid::Grid;

/// 6-point Gauss–Legendre rule on [-1, 1].
const GL_X: [f64; 6] = [
    -0.932_469_514_203_152,
    -0.661_209_386_466_264_5,
    -0.238_619_186_083_196_9,
    0.238_619_186_083_196_9,
    0.661_209_386_466_264_5,
    0.932_469_514_203_152,
];
const GL_W: [f64; 6] = [
    0.171_324_492_379_170_4,
    0.360_761_573_048_138_6,
    0.467_913_934_572_691,
    0.467_913_934_572_691,
    0.360_761_573_048_138_6,
    0.171_324_492_379_170_4,
];

/// Dense collocation matrix of the operator; `apply` is one sweep.
#[derive(Debug, Clone)]
pub struct Operator {
    matrix: DMatrix<f64>,
}

impl Operator {
    pub fn assemble(
        config: &ModelConfig,
        report: &ExponentReport,
        grid: &Grid,
    ) -> Result<Operator> {
        if report.d <= -1.0 {
            return Err(Error::Precondition(format!(
                "operator needs d > −1, got d = {}",
                report.d
            )));
        }
        let n = grid.len();
        let rows: Result<Vec<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|i| assemble_row(config, report, grid, i))
            .collect();
        let rows = rows?;
        let mut matrix = DMatrix::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, w) in row.into_iter().enumerate() {
                matrix[(i, j)] = w;
            }
        }
        Ok(Operator { matrix })
    }

    pub fn apply(&self, rho: &[f64]) -> Vec<f64> {
        let n = self.matrix.nrows();
        (0..n)
            .map(|i| (i..n).map(|j| self.matrix[(i, j)] * rho[j]).sum())
            .collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// One application of the operator to node values (validating wrapper).
pub fn apply_a(
    config: &ModelConfig,
    report: &ExponentReport,
    grid: &Grid,
    rho: &[f64],
) -> Result<Vec<f64>> {
    if rho.len() != grid.len() {
        return Err(Error::Domain(format!(
            "ρ has {} values for a {}-node grid",
            rho.len(),
            grid.len()
        )));
    }
    if rho.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("operator input ρ must be nonnegative".into()));
    }
    Ok(Operator::assemble(config, report, grid)?.apply(rho))
}

fn assemble_row(
    config: &ModelConfig,
    report: &ExponentReport,
    grid: &Grid,
    i: usize,
) -> Result<Vec<f64>> {
    let n = grid.len();
    let nodes = grid.nodes();
    let mut row = vec![0.0; n];
    let d = report.d;
    let alpha = report.alpha;

    if i == n - 1 {
        // continuity limit at x = 1: (d+1)^{-1} r(1)/c(1) · ρ(1)
        let c1 = config.c_small(1.0)?;
        row[n - 1] = config.kernel().density(1.0) / ((d + 1.0) * c1);
        return Ok(row);
    }

    let x = nodes[i];
    let c_x = config.c_small(x)?;
    if !(c_x > 0.0) {
        return Err(Error::Spec(format!("c({x}) = {c_x} must be positive")));
    }

    if x > config.x_star() {
        let pref = 1.0 / (x * (1.0 - x).powf(d + 1.0) * c_x);
        add_weighted_segments(&mut row, config, grid, pref, x, alpha, d, i);
    } else {
        let split = 0.95_f64.max(0.5 * (config.x_star() + 1.0));
        // keep at least the final segment on the exact singular moments
        let jc = nodes.partition_point(|&z| z < split).min(n - 2).max(i + 1);
        // right part in z with the exact (1−z)^d moments
        let pref_z = 1.0 / (x * (1.0 - x).powf(d + 1.0) * c_x);
        add_weighted_segments(&mut row, config, grid, pref_z, x, alpha, d, jc);
        // left part in y = z/x on kernel-scaled Gauss panels
        let pref_y = 1.0 / ((1.0 - x) * c_x);
        add_kernel_panels(&mut row, config, grid, pref_y, x, alpha, d, i, jc);
    }
    Ok(row)
}

/// Accumulate ∫_{z_from}^1 ψ(z)(1−z)^d dz with ψ(z) = (z/x)^α r(z/x) ρ(z)
/// linearized per segment; the (1−z)^d moments are exact, so the endpoint
/// singularity costs nothing.
#[allow(clippy::too_many_arguments)]
fn add_weighted_segments(
    row: &mut [f64],
    config: &ModelConfig,
    grid: &Grid,
    pref: f64,
    x: f64,
    alpha: f64,
    d: f64,
    from: usize,
) {
    let nodes = grid.nodes();
    let smooth = |z: f64| {
        let ratio = z / x;
        ratio.powf(alpha) * config.kernel().density(ratio)
    };
    for j in from..nodes.len() - 1 {
        let (a_w, b_w) = segment_weights(nodes[j], nodes[j + 1], d);
        row[j] += pref * smooth(nodes[j]) * a_w;
        row[j + 1] += pref * smooth(nodes[j + 1]) * b_w;
    }
}

/// Exact weights (on the left/right endpoint values of a linear integrand)
/// of ∫_{z_lo}^{z_hi} (1−z)^d · linear(z) dz.
pub(crate) fn segment_weights(z_lo: f64, z_hi: f64, d: f64) -> (f64, f64) {
    let u_lo = 1.0 - z_lo;
    let u_hi = 1.0 - z_hi;
    let h = z_hi - z_lo;
    let s0 = (u_lo.powf(d + 1.0) - u_hi.powf(d + 1.0)) / (d + 1.0);
    let s1 = (u_lo.powf(d + 2.0) - u_hi.powf(d + 2.0)) / (d + 2.0);
    ((s1 - u_hi * s0) / h, (u_lo * s0 - s1) / h)
}

/// Accumulate 1/((1−x)c(x)) ∫₁^{z_c/x} y^α ((1−xy)/(1−x))^d r(y) ρ(xy) dy
/// on Gauss–Legendre panels no wider than twice the kernel decay scale,
/// broken at the images of the grid nodes so ρ is linear within panels.
#[allow(clippy::too_many_arguments)]
fn add_kernel_panels(
    row: &mut [f64],
    config: &ModelConfig,
    grid: &Grid,
    pref: f64,
    x: f64,
    alpha: f64,
    d: f64,
    i: usize,
    jc: usize,
) {
    let nodes = grid.nodes();
    let kernel = config.kernel();
    let y_full = nodes[jc] / x;
    let y_end = y_full.min(kernel.tail_cutoff(alpha, 1e-16));
    if y_end <= 1.0 {
        return;
    }

    let mut breaks = vec![1.0];
    for &z in nodes.iter().take(jc + 1).skip(i + 1) {
        let img = z / x;
        if img > 1.0 && img < y_end {
            breaks.push(img);
        }
    }
    breaks.push(y_end);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * *b);

    let scale = kernel.resolution_scale();
    let one_minus_x = 1.0 - x;
    for w in breaks.windows(2) {
        for (lo, hi) in refine_panel(w[0], w[1], 2.0 * scale) {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for q in 0..6 {
                let y = mid + half * GL_X[q];
                let weight = pref * half * GL_W[q];
                let val = y.powf(alpha) * ((1.0 - x * y) / one_minus_x).powf(d) * kernel.density(y);
                if val == 0.0 {
                    continue;
                }
                let z = (x * y).clamp(nodes[i], nodes[jc]);
                let j = grid.segment_of(z);
                let t = (z - nodes[j]) / (nodes[j + 1] - nodes[j]);
                row[j] += weight * val * (1.0 - t);
                row[j + 1] += weight * val * t;
            }
        }
    }
}

/// Split [a, b] into panels of width ≤ `max_w` (up to 24 of them), then
/// geometrically with ratio 1.4 — power-law tails stay cheap that way.
fn refine_panel(a: f64, b: f64, max_w: f64) -> Vec<(f64, f64)> {
    let mut panels = Vec::new();
    let linear_end = b.min(a + 24.0 * max_w);
    let n_lin = ((linear_end - a) / max_w).ceil().max(1.0) as usize;
    let h = (linear_end - a) / n_lin as f64;
    for k in 0..n_lin {
        panels.push((a + k as f64 * h, a + (k + 1) as f64 * h));
    }
    let mut cur = linear_end;
    while cur < b {
        let next = (cur * 1.4).min(b);
        panels.push((cur, next));
        if next >= b {
            break;
        }
        cur = next;
    }
    panels
}
