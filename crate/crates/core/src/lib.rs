//! Robust model fitting by sample consensus.
//!
//! Three engines share one evaluation-budget contract:
//!
//! - [`consensus::run_ransac`]: classic random minimal-sample search.
//! - [`consensus::run_gasac`]: genetic sample consensus with best-half
//!   selection and per-gene mutation.
//! - [`consensus::run_adaptive_gasac`]: genetic sample consensus whose
//!   crossover and mutation probabilities are computed per individual from
//!   its normalized fitness, and whose mutation draws replacement genes from
//!   a roulette wheel trained on the parents of every generation.
//!
//! Fitness is the H-inlier count of the model fit from a chromosome's genes.
//! The budget counts distinct minimal samples fit: a gene set scored once in
//! a run is never fit again.
//! [`estimators`] provides the 2D line and planar homography minimal solvers,
//! [`datagen`] builds synthetic datasets with exact inlier ratios, and
//! [`bench`] drives repeated fixed-budget comparisons.

pub mod bench;
pub mod consensus;
pub mod datagen;
pub mod estimators;

pub use consensus::{
    run_adaptive_gasac, run_gasac, run_ransac, AdaptiveParams, Budget, Chromosome, ConsensusError,
    RouletteWheel, RunTrace,
};
pub use estimators::{
    count_inliers, Correspondence, Dataset, EstimateError, Estimator, Homography,
    HomographyEstimator, Line, LineEstimator, ModelParams, Point2,
};
