//! Stationary income distribution of a hierarchical economy.
//!
//! The crate solves the balance-equation fixed point ρ = Aρ for the
//! stationary income density on a graded grid, computes the predicted
//! Pareto exponents for net and gross income, diagnoses the spectrum of
//! the discretized operator, and verifies the supporting probabilistic
//! machinery (multiplicative Markov chains, exit-time bounds, random
//! geometric progressions, tail shadowing) by independent Monte Carlo and
//! quadrature checks.

// Guards written as `!(x > 0.0)` instead of `x <= 0.0` intentionally
// reject NaN; the clippy rewrite would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exponents;
pub mod model;
pub mod quad;
pub mod roots;
pub mod solver;
pub mod spectral;
pub mod stats;
pub mod stochastic;
pub mod tails;

pub use error::{Error, Result};
pub use exponents::ExponentReport;
pub use model::{DemandSpec, KernelSpec, ModelConfig, TailRule, WelfareSpec};
pub use solver::{DensityTable, Grid, RhoSolution};
pub use spectral::SpectrumReport;
pub use stochastic::{ChainPath, GeomProgSpec, McEstimate, RandomStream};
pub use tails::{FitMethod, FitWindow, TailFit};
