//! Minimal-solver contract and the concrete geometric estimators.

mod homography;
mod line;

use std::fmt::Debug;

use thiserror::Error;

pub use homography::{Homography, HomographyEstimator};
pub use line::{Line, LineEstimator};

/// Two points closer than this are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Three points spanning less than this (twice the triangle area, in
/// conditioned coordinates) are treated as collinear.
pub const COLLINEARITY_TOL: f64 = 1e-9;
/// Homogeneous coordinate magnitude below which a projection is at infinity.
pub const PROJECTION_W_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("degenerate minimal sample")]
    DegenerateSample,
    #[error("point projects to infinity")]
    ProjectionAtInfinity,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("observation {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("label count {labels} does not match observation count {points}")]
    LabelMismatch { points: usize, labels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A putative match between a point in the source view and one in the
/// target view.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Correspondence {
    pub source: Point2,
    pub target: Point2,
}

impl Correspondence {
    pub const fn new(source: Point2, target: Point2) -> Self {
        Self { source, target }
    }
}

/// Observation types a [`Dataset`] can hold.
pub trait Observation: Clone + Debug + Send + Sync {
    fn is_finite(&self) -> bool;
}

impl Observation for Point2 {
    fn is_finite(&self) -> bool {
        Point2::is_finite(self)
    }
}

impl Observation for Correspondence {
    fn is_finite(&self) -> bool {
        self.source.is_finite() && self.target.is_finite()
    }
}

/// Indexed observations, optionally carrying ground-truth inlier labels.
///
/// Indices `0..len()` are stable for the lifetime of the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<O> {
    points: Vec<O>,
    labels: Option<Vec<bool>>,
}

impl<O: Observation> Dataset<O> {
    pub fn new(points: Vec<O>) -> Result<Self, DatasetError> {
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(DatasetError::NonFinite { index });
        }
        Ok(Self {
            points,
            labels: None,
        })
    }

    pub fn with_labels(points: Vec<O>, labels: Vec<bool>) -> Result<Self, DatasetError> {
        if labels.len() != points.len() {
            return Err(DatasetError::LabelMismatch {
                points: points.len(),
                labels: labels.len(),
            });
        }
        let mut data = Self::new(points)?;
        data.labels = Some(labels);
        Ok(data)
    }
}

impl<O> Dataset<O> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[O] {
        &self.points
    }

    pub fn get(&self, index: usize) -> Option<&O> {
        self.points.get(index)
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    /// Number of observations labeled as inliers, if labels are present.
    pub fn inlier_count(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().filter(|&&b| b).count())
    }
}

/// Flat parameter view of a fitted model.
pub trait ModelParams {
    fn parameters(&self) -> Vec<f64>;
}

/// A minimal solver plus the residual used to score its hypotheses.
pub trait Estimator: Sync {
    type Observation: Observation;
    type Model: ModelParams + Clone + Debug + PartialEq + Send + Sync;

    /// Number of observations needed to determine a model.
    fn minimal_sample_size(&self) -> usize;

    /// Residuals strictly below this value count as inliers.
    fn inlier_threshold(&self) -> f64;

    fn fit(&self, sample: &[&Self::Observation]) -> Result<Self::Model, EstimateError>;

    fn residual(&self, model: &Self::Model, obs: &Self::Observation) -> Result<f64, EstimateError>;

    /// Fits the model determined by the observations at `indices`.
    ///
    /// Panics if an index is out of range for `data`.
    fn fit_indices(
        &self,
        data: &Dataset<Self::Observation>,
        indices: &[usize],
    ) -> Result<Self::Model, EstimateError> {
        let sample: Vec<&Self::Observation> = indices.iter().map(|&i| &data.points[i]).collect();
        self.fit(&sample)
    }
}

/// Number of observations whose residual is below the estimator's threshold.
/// Observations that project to infinity are not inliers.
pub fn count_inliers<E: Estimator>(
    estimator: &E,
    model: &E::Model,
    data: &Dataset<E::Observation>,
) -> usize {
    let threshold = estimator.inlier_threshold();
    data.points()
        .iter()
        .filter(|obs| matches!(estimator.residual(model, obs), Ok(r) if r < threshold))
        .count()
}
