//! Synthetic datasets with exactly controlled inlier ratios, plus the
//! exhaustive minimal-sample oracle used to check the engines.

mod csv_io;

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::estimators::{
    count_inliers, Correspondence, Dataset, Estimator, Homography, HomographyEstimator, Line,
    LineEstimator, Point2,
};

pub use csv_io::{read_dataset, write_dataset, CsvError};

/// Consecutive rejected draws after which generation gives up.
pub const MAX_REJECTIONS: usize = 10_000;
/// Largest number of minimal subsets [`oracle_best`] will enumerate.
pub const ORACLE_LIMIT: u128 = 500_000;
/// Outliers must sit farther than this multiple of the inlier threshold
/// from the hidden model.
pub const OUTLIER_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatagenError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("rejection sampling failed {MAX_REJECTIONS} consecutive times: {0}")]
    InfeasibleSpec(&'static str),
    #[error("{subsets} minimal subsets exceed the oracle limit of {ORACLE_LIMIT}")]
    TooLarge { subsets: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Line,
    Homography,
}

impl Task {
    pub fn minimal_sample_size(self) -> usize {
        match self {
            Task::Line => 2,
            Task::Homography => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Line => "line",
            Task::Homography => "homography",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "line" => Ok(Task::Line),
            "homography" => Ok(Task::Homography),
            other => Err(format!(
                "unknown task `{other}` (expected line or homography)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub task: Task,
    pub n: usize,
    pub inlier_ratio: f64,
    pub noise_sigma: f64,
    /// Half-width of the square all points are drawn from.
    pub outlier_box: f64,
    /// Threshold of the estimator the data is meant for; outliers are kept
    /// [`OUTLIER_MARGIN`] times this far from the hidden model.
    pub inlier_threshold: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `floor(n * inlier_ratio)`, tolerant of representation error so that
    /// e.g. 29% of 100 is 29.
    pub fn inlier_count(&self) -> usize {
        (self.n as f64 * self.inlier_ratio + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        let bad = |msg: String| Err(DatagenError::InvalidSpec(msg));
        if self.n < 8 {
            return bad(format!("n must be >= 8, got {}", self.n));
        }
        if !(self.inlier_ratio > 0.0 && self.inlier_ratio <= 1.0) {
            return bad(format!(
                "inlier ratio must lie in (0, 1], got {}",
                self.inlier_ratio
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!(
                "noise sigma must be >= 0, got {}",
                self.noise_sigma
            ));
        }
        if !(self.outlier_box > 0.0 && self.outlier_box.is_finite()) {
            return bad(format!("outlier box must be > 0, got {}", self.outlier_box));
        }
        if !(self.inlier_threshold > 0.0 && self.inlier_threshold.is_finite()) {
            return bad(format!(
                "inlier threshold must be > 0, got {}",
                self.inlier_threshold
            ));
        }
        let m = self.task.minimal_sample_size();
        if self.inlier_count() < m {
            return bad(format!(
                "{} inliers cannot support a minimal sample of {m}",
                self.inlier_count()
            ));
        }
        Ok(())
    }
}

/// A generated dataset of either task.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskData {
    Line(Dataset<Point2>),
    Homography(Dataset<Correspondence>),
}

impl TaskData {
    pub fn task(&self) -> Task {
        match self {
            TaskData::Line(_) => Task::Line,
            TaskData::Homography(_) => Task::Homography,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TaskData::Line(d) => d.len(),
            TaskData::Homography(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Option<&[bool]> {
        match self {
            TaskData::Line(d) => d.labels(),
            TaskData::Homography(d) => d.labels(),
        }
    }
}

/// Generator stream for a seed. Engines use a different stream of the same
/// seed.
pub fn data_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn generate(spec: &SyntheticSpec) -> Result<TaskData, DatagenError> {
    Ok(match spec.task {
        Task::Line => TaskData::Line(generate_line(spec)?.0),
        Task::Homography => TaskData::Homography(generate_homography(spec)?.0),
    })
}

fn uniform_point<R: Rng>(half: f64, rng: &mut R) -> Point2 {
    Point2::new(
        rng.random_range(-half..=half),
        rng.random_range(-half..=half),
    )
}

fn rejection<T, R: Rng, F>(rng: &mut R, what: &'static str, mut draw: F) -> Result<T, DatagenError>
where
    F: FnMut(&mut R) -> Option<T>,
{
    for _ in 0..MAX_REJECTIONS {
        if let Some(v) = draw(rng) {
            return Ok(v);
        }
    }
    Err(DatagenError::InfeasibleSpec(what))
}

/// Shuffles inliers (first `k`) and outliers together, keeping labels.
fn assemble<O, R: Rng>(obs: Vec<O>, k: usize, rng: &mut R) -> (Vec<O>, Vec<bool>) {
    use rand::seq::SliceRandom;
    let mut tagged: Vec<(O, bool)> = obs
        .into_iter()
        .enumerate()
        .map(|(i, o)| (o, i < k))
        .collect();
    tagged.shuffle(rng);
    tagged.into_iter().unzip()
}

/// Points near a hidden line plus uniform outliers. Returns the data and
/// the hidden line.
pub fn generate_line(spec: &SyntheticSpec) -> Result<(Dataset<Point2>, Line), DatagenError> {
    if spec.task != Task::Line {
        return Err(DatagenError::InvalidSpec("spec task is not line".into()));
    }
    spec.validate()?;
    let mut rng = data_rng(spec.seed);
    let half = spec.outlier_box;
    let k = spec.inlier_count();

    let anchor = uniform_point(0.5 * half, &mut rng);
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    let dir = Point2::new(theta.cos(), theta.sin());
    let truth = Line::through(&anchor, &Point2::new(anchor.x + dir.x, anchor.y + dir.y))
        .expect("unit direction");
    let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma checked");
    let inside = |p: &Point2| p.x.abs() <= half && p.y.abs() <= half;

    let mut obs = Vec::with_capacity(spec.n);
    for _ in 0..k {
        let base = rejection(&mut rng, "inlier outside the box", |rng| {
            let t = rng.random_range(-2.0 * half..=2.0 * half);
            let p = Point2::new(anchor.x + t * dir.x, anchor.y + t * dir.y);
            inside(&p).then_some(p)
        })?;
        obs.push(Point2::new(
            base.x + noise.sample(&mut rng),
            base.y + noise.sample(&mut rng),
        ));
    }
    let min_residual = OUTLIER_MARGIN * spec.inlier_threshold;
    for _ in k..spec.n {
        obs.push(rejection(
            &mut rng,
            "outlier too close to the line",
            |rng| {
                let p = uniform_point(half, rng);
                (truth.distance(&p) > min_residual).then_some(p)
            },
        )?);
    }
    let (points, labels) = assemble(obs, k, &mut rng);
    let data = Dataset::with_labels(points, labels).expect("finite by construction");
    Ok((data, truth))
}

/// Correspondences under a hidden well-conditioned homography plus
/// uniformly random mismatches.
pub fn generate_homography(
    spec: &SyntheticSpec,
) -> Result<(Dataset<Correspondence>, Homography), DatagenError> {
    if spec.task != Task::Homography {
        return Err(DatagenError::InvalidSpec(
            "spec task is not homography".into(),
        ));
    }
    spec.validate()?;
    let mut rng = data_rng(spec.seed);
    let half = spec.outlier_box;
    let k = spec.inlier_count();

    let truth = rejection(&mut rng, "hidden homography is singular", |rng| {
        let mut u = |r: f64| rng.random_range(-r..=r);
        let h = [
            1.0 + u(0.2),
            u(0.2),
            u(0.2 * half),
            u(0.2),
            1.0 + u(0.2),
            u(0.2 * half),
            u(0.1 / half),
            u(0.1 / half),
            1.0,
        ];
        Homography::from_row_major(h)
    })?;
    let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma checked");

    let mut obs = Vec::with_capacity(spec.n);
    for _ in 0..k {
        let c = rejection(&mut rng, "inlier projects to infinity", |rng| {
            let s = uniform_point(half, rng);
            truth.project(&s).ok().map(|t| Correspondence::new(s, t))
        })?;
        obs.push(Correspondence::new(
            c.source,
            Point2::new(
                c.target.x + noise.sample(&mut rng),
                c.target.y + noise.sample(&mut rng),
            ),
        ));
    }
    let min_residual = OUTLIER_MARGIN * spec.inlier_threshold;
    for _ in k..spec.n {
        obs.push(rejection(
            &mut rng,
            "outlier too close to the model",
            |rng| {
                let c = Correspondence::new(uniform_point(half, rng), uniform_point(half, rng));
                matches!(truth.transfer_error(&c), Ok(r) if r > min_residual).then_some(c)
            },
        )?);
    }
    let (points, labels) = assemble(obs, k, &mut rng);
    let data = Dataset::with_labels(points, labels).expect("finite by construction");
    Ok((data, truth))
}

/// `C(n, k)` without overflow for the sizes involved.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Best inlier count over every minimal subset of `data`.
pub fn oracle_best<E: Estimator>(
    estimator: &E,
    data: &Dataset<E::Observation>,
) -> Result<usize, DatagenError> {
    let m = estimator.minimal_sample_size();
    let subsets = binomial(data.len(), m);
    if subsets > ORACLE_LIMIT {
        return Err(DatagenError::TooLarge { subsets });
    }
    Ok((0..data.len())
        .combinations(m)
        .filter_map(|idx| estimator.fit_indices(data, &idx).ok())
        .map(|model| count_inliers(estimator, &model, data))
        .max()
        .unwrap_or(0))
}

/// Line estimator matching a spec's threshold.
pub fn line_estimator(spec: &SyntheticSpec) -> LineEstimator {
    LineEstimator::new(spec.inlier_threshold)
}

pub fn homography_estimator(spec: &SyntheticSpec) -> HomographyEstimator {
    HomographyEstimator::new(spec.inlier_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_spec(n: usize, ratio: f64, sigma: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            task: Task::Line,
            n,
            inlier_ratio: ratio,
            noise_sigma: sigma,
            outlier_box: 100.0,
            inlier_threshold: 1.0,
            seed,
        }
    }

    #[test]
    fn exact_line_inliers() {
        let spec = line_spec(100, 0.4, 0.0, 17);
        let (data, truth) = generate_line(&spec).unwrap();
        let labels = data.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&b| b).count(), 40);
        for (p, &inlier) in data.points().iter().zip(labels) {
            if inlier {
                assert!(truth.distance(p) < 1e-9);
            } else {
                assert!(truth.distance(p) > 3.0);
            }
        }
    }

    #[test]
    fn noisy_homography_labels() {
        let spec = SyntheticSpec {
            task: Task::Homography,
            noise_sigma: 0.5,
            inlier_ratio: 0.1,
            ..line_spec(100, 0.1, 0.5, 4)
        };
        let (data, truth) = generate_homography(&spec).unwrap();
        assert_eq!(data.inlier_count(), Some(10));
        for (c, &inlier) in data.points().iter().zip(data.labels().unwrap()) {
            if !inlier {
                assert!(truth.transfer_error(c).unwrap() > 3.0);
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = line_spec(60, 0.3, 0.2, 99);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&SyntheticSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(generate(&spec).unwrap(), other);
        assert_eq!(other.labels().unwrap().iter().filter(|&&b| b).count(), 18);
    }

    #[test]
    fn floor_semantics() {
        assert_eq!(line_spec(100, 0.1, 0.0, 0).inlier_count(), 10);
        assert_eq!(line_spec(100, 0.29, 0.0, 0).inlier_count(), 29);
        assert_eq!(line_spec(33, 0.5, 0.0, 0).inlier_count(), 16);
    }

    #[test]
    fn invalid_specs() {
        assert!(line_spec(7, 0.5, 0.0, 0).validate().is_err());
        assert!(line_spec(10, 0.0, 0.0, 0).validate().is_err());
        assert!(line_spec(10, 0.1, 0.0, 0).validate().is_err());
        assert!(line_spec(10, 0.5, -1.0, 0).validate().is_err());
        let hom = SyntheticSpec {
            task: Task::Homography,
            ..line_spec(10, 0.3, 0.0, 0)
        };
        assert!(hom.validate().is_err());
    }

    #[test]
    fn infeasible_outlier_region() {
        // The whole box lies within the outlier margin of any line through it.
        let spec = SyntheticSpec {
            outlier_box: 0.5,
            ..line_spec(20, 0.5, 0.0, 1)
        };
        assert!(matches!(
            generate_line(&spec),
            Err(DatagenError::InfeasibleSpec(_))
        ));
    }

    #[test]
    fn oracle_on_six_points() {
        let pts = vec![
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 2.0),
            Point2::new(2.0, 3.0),
            Point2::new(3.0, 4.0),
            Point2::new(0.0, 9.0),
            Point2::new(5.0, -3.0),
        ];
        let data = Dataset::new(pts).unwrap();
        assert_eq!(oracle_best(&LineEstimator::new(0.5), &data), Ok(4));
    }

    #[test]
    fn oracle_single_subset_and_saturation() {
        let data = Dataset::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)]).unwrap();
        assert_eq!(oracle_best(&LineEstimator::new(0.1), &data), Ok(2));
        let data = Dataset::new(vec![Point2::new(2.0, 2.0); 9]).unwrap();
        // Every subset is degenerate: no model explains anything.
        assert_eq!(oracle_best(&LineEstimator::new(0.1), &data), Ok(0));
        let pts: Vec<_> = (0..9).map(|i| Point2::new(i as f64 * 1e-3, 0.0)).collect();
        let data = Dataset::new(pts).unwrap();
        assert_eq!(oracle_best(&LineEstimator::new(0.1), &data), Ok(9));
    }

    #[test]
    fn oracle_refuses_large_inputs() {
        let pts: Vec<_> = (0..1001).map(|i| Point2::new(i as f64, 0.0)).collect();
        let data = Dataset::new(pts).unwrap();
        assert_eq!(
            oracle_best(&LineEstimator::new(0.1), &data),
            Err(DatagenError::TooLarge { subsets: 500_500 })
        );
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(50, 4), 230_300);
    }

    #[test]
    fn noiseless_oracle_covers_all_inliers() {
        for seed in 0..5 {
            let spec = line_spec(30, 0.4, 0.0, seed);
            let (data, _) = generate_line(&spec).unwrap();
            assert!(oracle_best(&line_estimator(&spec), &data).unwrap() >= 12);
        }
    }
}
