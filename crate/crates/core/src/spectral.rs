//! Finite-dimensional spectrum diagnostics for the operator A.
//!
//! The discretization is the same collocation matrix the solver iterates
//! (chosen over a Fourier basis: global polynomial/trigonometric bases do
//! not satisfy the boundary conditions ρ′ = γ ρ and converge poorly here),
//! so fixed points and eigenvectors are directly comparable with solver
//! output.  Collocation makes A_n upper triangular, hence its spectrum is
//! real; the checked assertions below hold either way.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::exponents::ExponentReport;
use crate::model::ModelConfig;
use crate::solver::{Grid, Operator};

/// Tolerance for clustering eigenvalues when estimating multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-6;

/// Eigenvalues of I − A_n with the near-zero structure flagged.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub n: usize,
    /// Eigenvalues of I − A_n, sorted by (re, im).
    pub eigenvalues: Vec<Complex<f64>>,
    /// Eigenvalue of I − A_n nearest 0.
    pub min_modulus_eigenvalue: Complex<f64>,
    /// Count of eigenvalues within `MULTIPLICITY_TOL` of the minimal one.
    pub multiplicity_estimate: usize,
}

impl SpectrumReport {
    /// Eigenvalues of A_n itself (1 − μ).
    pub fn operator_eigenvalues(&self) -> Vec<Complex<f64>> {
        self.eigenvalues
            .iter()
            .map(|m| Complex::new(1.0 - m.re, -m.im))
            .collect()
    }
}

/// Collocation matrix of A on an `n`-node default solver grid.
pub fn discretize_a(
    config: &ModelConfig,
    report: &ExponentReport,
    n: usize,
) -> Result<DMatrix<f64>> {
    if n < 8 {
        return Err(Error::Spec(format!(
            "spectrum discretization needs n ≥ 8, got {n}"
        )));
    }
    let grid = Grid::build(n, 1e-4, 2.0)?;
    Ok(Operator::assemble(config, report, &grid)?.matrix().clone())
}

/// Dense nonsymmetric eigendecomposition of I − A_n.
pub fn spectrum(a_matrix: &DMatrix<f64>) -> Result<SpectrumReport> {
    if a_matrix.nrows() != a_matrix.ncols() {
        return Err(Error::Domain("spectrum needs a square matrix".into()));
    }
    let n = a_matrix.nrows();
    let shifted = DMatrix::identity(n, n) - a_matrix;
    let schur =
        nalgebra::linalg::Schur::try_new(shifted, 1e-12, 10_000).ok_or(Error::EigenFailed)?;
    let eig = schur.complex_eigenvalues();
    let mut eigenvalues: Vec<Complex<f64>> = eig.iter().copied().collect();
    eigenvalues.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let min_modulus_eigenvalue = *eigenvalues
        .iter()
        .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .expect("n ≥ 1");
    let multiplicity_estimate = eigenvalues
        .iter()
        .filter(|m| (*m - min_modulus_eigenvalue).norm() < MULTIPLICITY_TOL)
        .count();
    Ok(SpectrumReport {
        n,
        eigenvalues,
        min_modulus_eigenvalue,
        multiplicity_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents;
    use crate::model::{DemandSpec, KernelSpec, WelfareSpec};
    use crate::solver::solve_rho;

    fn setup(lambda: f64) -> (ModelConfig, ExponentReport) {
        let config = ModelConfig::new(
            DemandSpec::Linear,
            KernelSpec::exponential(lambda).unwrap(),
            WelfareSpec::rational_default(),
            0.5,
        )
        .unwrap();
        let report = exponents::compute(&config).unwrap();
        (config, report)
    }

    #[test]
    fn identity_matrix_spectrum_is_zero() {
        let id = DMatrix::identity(12, 12);
        let rep = spectrum(&id).unwrap();
        assert!(rep.eigenvalues.iter().all(|m| m.norm() < 1e-12));
        assert_eq!(rep.multiplicity_estimate, 12);
    }

    #[test]
    fn rotation_block_eigenvalues_conjugate_closed() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = -1.0;
        let rep = spectrum(&m).unwrap();
        // I − m has eigenvalues 1 ± i
        let mut ims: Vec<f64> = rep.eigenvalues.iter().map(|e| e.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[0] + 1.0).abs() < 1e-10 && (ims[1] - 1.0).abs() < 1e-10);
        assert!(rep.eigenvalues.iter().all(|e| (e.re - 1.0).abs() < 1e-10));
    }

    #[test]
    fn rejects_small_and_nonsquare() {
        let (config, report) = setup(3.0);
        assert!(discretize_a(&config, &report, 4).is_err());
        assert!(spectrum(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn matrix_reproduces_solver_fixed_point() {
        let (config, report) = setup(3.0);
        let n = 101;
        let m = discretize_a(&config, &report, n).unwrap();
        let grid = Grid::build(n, 1e-4, 2.0).unwrap();
        let sol = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
        let rho = nalgebra::DVector::from_vec(sol.rho.clone());
        let image = &m * &rho;
        let gap = image
            .iter()
            .zip(sol.rho.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(
            gap <= 1e-9,
            "matrix application misses the fixed point by {gap}"
        );
    }

    #[test]
    fn leading_eigenvalue_stable_under_refinement() {
        let (config, report) = setup(3.0);
        let lead = |n: usize| {
            let rep = spectrum(&discretize_a(&config, &report, n).unwrap()).unwrap();
            // leading eigenvalue of A_n = 1 − (eigenvalue of I−A_n nearest 0)
            1.0 - rep.min_modulus_eigenvalue.re
        };
        assert!((lead(8) - lead(16)).abs() <= 1e-2);
    }

    #[test]
    fn near_zero_eigenvalue_simple_for_reference_configs() {
        for lambda in [3.0, 1.5] {
            let (config, report) = setup(lambda);
            let rep = spectrum(&discretize_a(&config, &report, 64).unwrap()).unwrap();
            assert!(rep.min_modulus_eigenvalue.norm() < 1e-8);
            assert_eq!(rep.multiplicity_estimate, 1, "λ = {lambda}");
        }
    }

    #[test]
    fn real_parts_contained_in_the_reference_band() {
        // the displayed arc of eig(I − A_n) sits inside [−1.1, 1.1] at n = 100
        for lambda in [3.0, 1.5] {
            let (config, report) = setup(lambda);
            let rep = spectrum(&discretize_a(&config, &report, 100).unwrap()).unwrap();
            assert!(
                rep.eigenvalues.iter().all(|m| m.re.abs() <= 1.1),
                "λ = {lambda}: real part outside [−1.1, 1.1]"
            );
        }
    }

    #[test]
    fn perron_eigenvector_scales_positive() {
        // upper-triangular back-substitution for (A_n − I)v = 0 at the unit
        // eigenvalue gives a strictly positive vector
        let (config, report) = setup(3.0);
        let m = discretize_a(&config, &report, 64).unwrap();
        let n = 64;
        let mut v = vec![0.0; n];
        v[n - 1] = 1.0;
        for i in (0..n - 1).rev() {
            let mut acc = 0.0;
            for j in i + 1..n {
                acc += m[(i, j)] * v[j];
            }
            v[i] = acc / (1.0 - m[(i, i)]);
        }
        assert!(v.iter().all(|&x| x > 0.0));
    }
}
