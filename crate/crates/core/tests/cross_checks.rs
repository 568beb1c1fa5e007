//! Cross-module consistency: the chain weight against the operator, the
//! solver fixed point against the probabilistic representation, and the
//! boundary exponent against the reconstructed density.

use hiereco::config::presets;
use hiereco::exponents;
use hiereco::model::{probe_grid, ModelConfig};
use hiereco::quad;
use hiereco::solver::{solve_rho, Grid};
use hiereco::stochastic::{estimate_rho_mc, f_factor, McOptions, RandomStream};
use hiereco::ExponentReport;

fn reference_configs() -> Vec<(&'static str, ModelConfig)> {
    vec![
        ("linear λ=3", presets::linear(3.0)),
        ("slowly varying λ=2", presets::slowly_varying(2.0)),
        ("sigmoidal λ=3.9", presets::sigmoidal(20.0, 3.9)),
    ]
}

#[test]
fn z_ratio_bounded_by_one_below_the_switch_point() {
    // Z_α(x) ≤ (1−x) c(x) on (0, x_*]
    for (name, config) in reference_configs() {
        let report = exponents::compute(&config).unwrap();
        for x in probe_grid(512) {
            if x > config.x_star() {
                continue;
            }
            let z = config.kernel().z_mass(report.alpha, x).unwrap();
            let cap = (1.0 - x) * config.c_small(x).unwrap();
            assert!(
                z <= cap * (1.0 + 1e-12),
                "{name}: Z/cap = {} at x = {x}",
                z / cap
            );
        }
    }
}

/// ∫_{z_s}^1 g(z) (1−z)^d dz through the substitution w = (1−z)^{d+1},
/// which removes the endpoint singularity for any d > −1.
fn singular_tail_integral(g: impl Fn(f64) -> f64, z_s: f64, d: f64) -> f64 {
    let w_end = (1.0 - z_s).powf(d + 1.0);
    quad::integrate_with_floor(
        |w: f64| g(1.0 - w.powf(1.0 / (d + 1.0))),
        0.0,
        w_end,
        1e-11,
        1e-14,
    )
    .unwrap()
    .value
        / (d + 1.0)
}

/// (A h)(x) by direct adaptive quadrature of the defining integral.
fn apply_direct(
    config: &ModelConfig,
    report: &ExponentReport,
    h: impl Fn(f64) -> f64,
    x: f64,
) -> f64 {
    let c = config.c_small(x).unwrap();
    let d = report.d;
    let smooth = |z: f64| (z / x).powf(report.alpha) * config.kernel().density(z / x) * h(z);
    // break at the kernel decay scale in z and isolate the right endpoint
    let z_s = 1.0 - (1.0 - x) * 1e-3;
    let scale = config.kernel().resolution_scale() * x;
    let breaks = quad::scaled_breakpoints(x, z_s, scale.max(1e-8));
    let body = quad::integrate_split_with_floor(
        |z: f64| smooth(z) * (1.0 - z).powf(d),
        &breaks,
        1e-11,
        1e-14,
    )
    .unwrap()
    .value;
    let tail = singular_tail_integral(smooth, z_s, d);
    (body + tail) / (x * (1.0 - x).powf(d + 1.0) * c)
}

/// E_x[F(x, x₁) h(x₁)] by quadrature against the branch transition density.
fn expectation_direct(
    config: &ModelConfig,
    report: &ExponentReport,
    h: impl Fn(f64) -> f64,
    x: f64,
) -> f64 {
    let kernel = config.kernel();
    let z_s = 1.0 - (1.0 - x) * 1e-3;
    if x <= config.x_star() {
        let z_mass = kernel.z_mass(report.alpha, x).unwrap();
        let density = |y: f64| (y / x).powf(report.alpha) * kernel.density(y / x) / (x * z_mass);
        // F carries the ((1−y)/(1−x))^d factor; pull it out for the sliver
        let smooth = |y: f64| {
            f_factor(config, report, x, y).unwrap()
                * ((1.0 - x) / (1.0 - y)).powf(report.d)
                * density(y)
                * h(y)
        };
        let scale = kernel.resolution_scale() * x;
        let breaks = quad::scaled_breakpoints(x, z_s, scale.max(1e-8));
        let body = quad::integrate_split_with_floor(
            |y: f64| smooth(y) * ((1.0 - y) / (1.0 - x)).powf(report.d),
            &breaks,
            1e-11,
            1e-14,
        )
        .unwrap()
        .value;
        let tail = singular_tail_integral(smooth, z_s, report.d) / (1.0 - x).powf(report.d);
        body + tail
    } else {
        let d = report.d;
        // the (1−y)^d factor lives in the transition density alone here
        let smooth = |y: f64| {
            f_factor(config, report, x, y).unwrap() * (d + 1.0) * h(y) / (1.0 - x).powf(d + 1.0)
        };
        let body = quad::integrate_with_floor(
            |y: f64| smooth(y) * (1.0 - y).powf(d),
            x,
            z_s,
            1e-11,
            1e-14,
        )
        .unwrap()
        .value;
        body + singular_tail_integral(smooth, z_s, d)
    }
}

#[test]
fn chain_weight_reproduces_the_operator_on_both_branches() {
    // E_x[F(x, x₁) h(x₁)] = (A h)(x) is the defining property of F
    let h = |z: f64| 1.0 + 0.4 * z + z * z;
    for (name, config) in reference_configs() {
        let report = exponents::compute(&config).unwrap();
        for x in [0.05, 0.3, 0.5, 0.6, 0.9] {
            let via_chain = expectation_direct(&config, &report, h, x);
            let via_operator = apply_direct(&config, &report, h, x);
            assert!(
                (via_chain - via_operator).abs() <= 1e-6 * via_operator.abs(),
                "{name} at x = {x}: {via_chain} vs {via_operator}"
            );
        }
    }
}

#[test]
fn expectation_identity_holds_at_the_solver_fixed_point() {
    // ρ(x) = E_x F(x, x₁) ρ(x₁) with the deterministic solution as oracle
    let config = presets::linear(3.0);
    let report = exponents::compute(&config).unwrap();
    let grid = Grid::build(401, 1e-4, 2.0).unwrap();
    let sol = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
    for x in [0.2, 0.5, 0.8] {
        let lhs = expectation_direct(&config, &report, |z| sol.rho_at(z), x);
        let rhs = sol.rho_at(x);
        assert!(
            (lhs - rhs).abs() < 5e-5,
            "expectation identity off by {} at x = {x}",
            (lhs - rhs).abs()
        );
    }
}

#[test]
fn monte_carlo_agrees_with_the_solver_for_the_saturating_config() {
    let config = presets::sigmoidal(20.0, 4.0);
    let report = exponents::compute(&config).unwrap();
    let grid = Grid::build(401, 1e-4, 2.0).unwrap();
    let sol = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
    let est = estimate_rho_mc(
        &config,
        &report,
        0.2,
        20_000,
        RandomStream::new(11, 0),
        &McOptions::default(),
    )
    .unwrap();
    let gap = (est.mean - sol.rho_at(0.2)).abs();
    assert!(
        gap <= 3.0 * est.std_error,
        "MC {} vs solver {} (3σ = {})",
        est.mean,
        sol.rho_at(0.2),
        3.0 * est.std_error
    );
    assert_eq!(est.capped, 0);
}

#[test]
fn boundary_exponent_recovered_from_the_reconstructed_density() {
    // slope of ln n(1/x) against ln(1−x) near x = 1 returns d: the
    // factorization carries the entire boundary behavior, ρ only adds a
    // bounded correction
    for (lambda, expected) in [(3.0, 0.0), (4.0, 1.0 / 3.0), (2.0, -1.0 / 3.0)] {
        let config = presets::linear(lambda);
        let report = exponents::compute(&config).unwrap();
        let grid = Grid::build(401, 1e-4, 2.0).unwrap();
        let sol = solve_rho(&config, &report, &grid, 1e-10, 4000).unwrap();
        let mut lx = Vec::new();
        let mut ln = Vec::new();
        for (x, r) in grid.nodes().iter().zip(&sol.rho) {
            let u = 1.0 - x;
            if u > 1e-4 && u < 1e-2 {
                let n = x.powf(report.alpha + 2.0) * u.powf(report.d) * r
                    / config.demand().value(1.0 / x);
                lx.push(u.ln());
                ln.push(n.ln());
            }
        }
        let (slope, _, _) = hiereco::stats::linear_fit(&lx, &ln);
        assert!(
            (slope - expected).abs() <= 0.02,
            "λ = {lambda}: fitted d = {slope} vs {expected}"
        );
    }
}

#[test]
fn fixed_point_converges_at_second_order_under_refinement() {
    let config = presets::linear(4.0);
    let report = exponents::compute(&config).unwrap();
    let reference = {
        let grid = Grid::build(1601, 1e-4, 2.0).unwrap();
        solve_rho(&config, &report, &grid, 1e-11, 6000).unwrap()
    };
    let err = |n: usize| {
        let grid = Grid::build(n, 1e-4, 2.0).unwrap();
        let sol = solve_rho(&config, &report, &grid, 1e-11, 6000).unwrap();
        [0.01, 0.05, 0.2, 0.5, 0.7, 0.9]
            .iter()
            .map(|&x| (sol.rho_at(x) - reference.rho_at(x)).abs())
            .fold(0.0, f64::max)
    };
    let coarse = err(101);
    let fine = err(202);
    assert!(
        fine <= 0.35 * coarse,
        "refinement 101 → 202 reduced the error only {coarse} → {fine}"
    );
}
