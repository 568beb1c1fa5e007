//! Probabilistic layer: the multiplicative Markov chain behind the
//! fixed-point equation, exit-time simulation and bounds, random geometric
//! progressions with their exponential-moment criteria, and the
//! lower-bound constants for the solved profile.

mod bounds;
mod chain;
mod geom;

pub use bounds::{
    anti_chebyshev_check, chain_log_increment_trial, f_star_estimate, lower_bound_constants,
    AntiChebyshev, FStarEstimate, LowerBoundConstants,
};
pub use chain::{
    estimate_rho_mc, exit_time_bound, f_factor, sample_chain_path, sample_step, simulate_exit,
    simulate_exit_paths, truncated_log_moment, ChainPath, ExitBound, ExitSample, McEstimate,
    McOptions,
};
pub use geom::{
    exp_moment_gamma_max, geom_moments, sample_progression, sigma_lambda, GeomMoments, GeomProgSpec,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reproducible stream handle: identical (seed, stream_id) reproduce
/// identical draws; distinct stream ids are independent ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    /// Instantiate the generator positioned on this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Derived stream `k` (used for per-path parallel tasks; the result is
    /// independent of how tasks are partitioned over threads).
    pub fn substream(&self, k: u64) -> RandomStream {
        let mixed = (self.stream_id ^ 0xD6E8_FEB8_6659_FD93)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(k);
        RandomStream {
            seed: self.seed,
            stream_id: mixed,
        }
    }
}
