//! Chromosome machinery, genetic operators and the three consensus engines.
//!
//! All engines draw every random decision from a single ChaCha8 stream
//! seeded by the caller (see [`engine_rng`]), so a `(data, params, seed)`
//! triple always yields the same [`RunTrace`].

mod adaptive;
mod chromosome;
mod evaluate;
mod gasac;
mod operators;
mod probability;
mod ransac;
mod wheel;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use adaptive::{run_adaptive_gasac, run_adaptive_gasac_observed, AdaptiveParams};
pub use chromosome::{Chromosome, Population};
pub use evaluate::{Budget, Evaluator, RunTrace};
pub use gasac::{gasac_mutation_probability, mutate_genes, run_gasac, run_gasac_observed};
pub use operators::{mutate_full, uniform_crossover, uniform_crossover_with, Repair};
pub use probability::{crossover_probability, mutation_probability, normalize_fitness};
pub use ransac::{ransac_iteration_bound, run_ransac};
pub use wheel::{RouletteWheel, WheelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsensusError {
    #[error("model budget exhausted")]
    BudgetExhausted,
    #[error("dataset has {n} observations but the estimator needs {m}")]
    InsufficientData { n: usize, m: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Stream id reserved for engine decisions. Synthetic data uses stream 0,
/// so the same seed can drive both without correlating them.
pub const ENGINE_STREAM: u64 = 1;

/// Genetic engines stop after this many consecutive generations that fit
/// no new model.
pub const STALL_LIMIT: usize = 1000;

/// The generator every engine uses for a given seed.
pub fn engine_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ENGINE_STREAM);
    rng
}

pub(crate) fn check_data(n: usize, m: usize) -> Result<(), ConsensusError> {
    if n < m {
        return Err(ConsensusError::InsufficientData { n, m });
    }
    Ok(())
}
