//! Deterministic fixed-point solver for ρ = Aρ and the reconstruction of
//! the net/gross income densities from the converged profile.

mod density;
mod grid;
mod operator;

pub use density::{
    gross_map, invert_gross, loglog_slope_in_range, reconstruct_density, DensityTable,
};
pub use grid::Grid;
pub use operator::{apply_a, Operator};

use crate::error::{Error, Result};
use crate::exponents::ExponentReport;
use crate::model::ModelConfig;

/// Converged (or honestly non-converged) node values of ρ with iteration
/// metadata.  ρ(1) = 1 by the per-sweep renormalization.
#[derive(Debug, Clone)]
pub struct RhoSolution {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Residuals of the last few sweeps (diagnostics on non-convergence).
    pub residual_history: Vec<f64>,
}

impl RhoSolution {
    pub fn rho_at(&self, x: f64) -> f64 {
        self.grid.interp(&self.rho, x)
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Iterate ρ ← Aρ from ρ₀ ≡ 1 with renormalization ρ(1) = 1 each sweep.
pub fn solve_rho(
    config: &ModelConfig,
    report: &ExponentReport,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
) -> Result<RhoSolution> {
    solve_rho_from(config, report, grid, tol, max_iter, &vec![1.0; grid.len()])
}

/// Same sweep from a caller-supplied strictly positive initialization.
pub fn solve_rho_from(
    config: &ModelConfig,
    report: &ExponentReport,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
    rho0: &[f64],
) -> Result<RhoSolution> {
    if rho0.len() != grid.len() {
        return Err(Error::Domain(format!(
            "initialization has {} values for a {}-node grid",
            rho0.len(),
            grid.len()
        )));
    }
    if rho0.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(
            "initialization must be strictly positive".into(),
        ));
    }
    let op = Operator::assemble(config, report, grid)?;
    let n = grid.len();
    let mut rho = rho0.to_vec();
    let mut prev_residual = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut history: Vec<f64> = Vec::new();

    for iter in 1..=max_iter {
        let mut next = op.apply(&rho);
        let scale = next[n - 1];
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Diverged(iter, history));
        }
        for v in &mut next {
            *v /= scale;
        }
        let residual = next
            .iter()
            .zip(&rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rho = next;
        history.push(residual);
        if history.len() > 8 {
            history.remove(0);
        }
        if residual <= tol {
            return Ok(RhoSolution {
                grid: grid.clone(),
                rho,
                iterations: iter,
                residual,
                converged: true,
                residual_history: history,
            });
        }
        if residual > prev_residual {
            growth_streak += 1;
            if growth_streak >= 50 {
                return Err(Error::Diverged(50, history));
            }
        } else {
            growth_streak = 0;
        }
        prev_residual = residual;
    }

    Ok(RhoSolution {
        grid: grid.clone(),
        rho,
        iterations: max_iter,
        residual: prev_residual,
        converged: false,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents;
    use crate::model::{DemandSpec, KernelSpec, WelfareSpec};

    fn setup(lambda: f64, demand: DemandSpec) -> (ModelConfig, ExponentReport) {
        let config = ModelConfig::new(
            demand,
            KernelSpec::exponential(lambda).unwrap(),
            WelfareSpec::rational_default(),
            0.5,
        )
        .unwrap();
        let report = exponents::compute(&config).unwrap();
        (config, report)
    }

    #[test]
    fn converges_positive_for_the_reference_config() {
        let (config, report) = setup(3.0, DemandSpec::Linear);
        let grid = Grid::build(201, 1e-4, 2.0).unwrap();
        let sol = solve_rho(&config, &report, &grid, 1e-8, 2000).unwrap();
        assert!(sol.converged);
        assert!(sol.residual <= 1e-8);
        assert!(sol.min_rho() > 0.0);
        assert_eq!(*sol.rho.last().unwrap(), 1.0);
    }

    #[test]
    fn initialization_independent_fixed_point() {
        let (config, report) = setup(3.0, DemandSpec::Linear);
        let grid = Grid::build(101, 1e-4, 2.0).unwrap();
        let a = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
        let wavy: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|x| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin())
            .collect();
        let b = solve_rho_from(&config, &report, &grid, 1e-10, 4000, &wavy).unwrap();
        let gap = a
            .rho
            .iter()
            .zip(&b.rho)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-6, "fixed points differ by {gap}");
    }

    #[test]
    fn restricted_grid_reproduces_the_tail_of_the_full_solution() {
        let (config, report) = setup(3.0, DemandSpec::Linear);
        let grid = Grid::build(201, 1e-4, 2.0).unwrap();
        let full = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
        let sub = grid.restrict(0.3).unwrap();
        let part = solve_rho(&config, &report, &sub, 1e-10, 4000).unwrap();
        let offset = grid.len() - sub.len();
        for (j, &v) in part.rho.iter().enumerate() {
            assert!(
                (v - full.rho[offset + j]).abs() < 1e-6,
                "node {j}: {v} vs {}",
                full.rho[offset + j]
            );
        }
    }

    #[test]
    fn restriction_above_the_switch_point_is_well_posed() {
        // every row is on the direct-form branch there
        let (config, report) = setup(3.0, DemandSpec::Linear);
        let grid = Grid::build(201, 1e-4, 2.0).unwrap();
        let full = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
        let sub = grid.restrict(0.7).unwrap();
        assert!(sub.x_min() > config.x_star());
        let part = solve_rho(&config, &report, &sub, 1e-10, 4000).unwrap();
        let offset = grid.len() - sub.len();
        for (j, &v) in part.rho.iter().enumerate() {
            assert!((v - full.rho[offset + j]).abs() < 1e-6);
        }
    }

    #[test]
    fn fixed_point_residual_definition() {
        let (config, report) = setup(4.0, DemandSpec::Linear);
        let grid = Grid::build(101, 1e-4, 2.0).unwrap();
        let sol = solve_rho(&config, &report, &grid, 1e-9, 4000).unwrap();
        let image = apply_a(&config, &report, &grid, &sol.rho).unwrap();
        let res = image
            .iter()
            .zip(&sol.rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(res <= 1e-8, "‖Aρ* − ρ*‖∞ = {res}");
    }

    #[test]
    fn reports_nonconvergence_honestly() {
        let (config, report) = setup(3.0, DemandSpec::Linear);
        let grid = Grid::build(101, 1e-4, 2.0).unwrap();
        let sol = solve_rho(&config, &report, &grid, 1e-12, 3).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 3);
        assert!(sol.residual > 1e-12);
    }
}
