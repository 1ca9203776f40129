//! Benchmark configuration: defaults, `key = value` files and overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::consensus::AdaptiveParams;
use crate::datagen::Task;

use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Ransac,
    Gasac,
    Adaptive,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Ransac, Engine::Gasac, Engine::Adaptive];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Ransac => "ransac",
            Engine::Gasac => "gasac",
            Engine::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ransac" => Ok(Engine::Ransac),
            "gasac" => Ok(Engine::Gasac),
            "adaptive" => Ok(Engine::Adaptive),
            other => Err(format!(
                "unknown engine `{other}` (expected ransac, gasac or adaptive)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub task: Task,
    pub n: usize,
    pub inlier_ratios: Vec<f64>,
    pub budget: usize,
    pub repetitions: usize,
    /// Always in canonical order (ransac, gasac, adaptive), deduplicated.
    pub engines: Vec<Engine>,
    pub params: AdaptiveParams,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub noise_sigma: f64,
    pub inlier_threshold: f64,
    pub outlier_box: f64,
}

impl BenchConfig {
    pub fn new(task: Task) -> Self {
        let (noise_sigma, inlier_threshold) = default_noise(task);
        Self {
            task,
            n: 200,
            inlier_ratios: vec![0.1, 0.2, 0.3, 0.4],
            budget: 400,
            repetitions: 100,
            engines: Engine::ALL.to_vec(),
            params: AdaptiveParams::default(),
            base_seed: 0,
            output_dir: PathBuf::from("bench-out"),
            noise_sigma,
            inlier_threshold,
            outlier_box: 100.0,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |field: &str, message: String| {
            Err(BenchError::ConfigInvalid {
                field: field.to_string(),
                message,
            })
        };
        if self.inlier_ratios.is_empty() {
            return bad("ratios", "at least one inlier ratio is required".into());
        }
        for &r in &self.inlier_ratios {
            if !(r > 0.0 && r <= 1.0) {
                return bad("ratios", format!("{r} is outside (0, 1]"));
            }
        }
        if self.repetitions == 0 {
            return bad("reps", "must be at least 1".into());
        }
        if self.engines.is_empty() {
            return bad("engines", "at least one engine is required".into());
        }
        let p = &self.params;
        if !(p.gamma >= 1.0 && p.gamma.is_finite()) {
            return bad("gamma", format!("must be >= 1, got {}", p.gamma));
        }
        if !(p.delta > 0.0 && p.delta <= 1.0) {
            return bad("delta", format!("must lie in (0, 1], got {}", p.delta));
        }
        if p.population_size < 4 {
            return bad("pop", format!("must be >= 4, got {}", p.population_size));
        }
        if self.budget < self.params.population_size {
            return bad(
                "budget",
                format!(
                    "must be at least the population size {}",
                    self.params.population_size
                ),
            );
        }
        if self.n < 8 {
            return bad("n", format!("must be >= 8, got {}", self.n));
        }
        let m = self.task.minimal_sample_size();
        for &r in &self.inlier_ratios {
            let k = (self.n as f64 * r + 1e-9).floor() as usize;
            if k < m {
                return bad(
                    "ratios",
                    format!("ratio {r} leaves {k} inliers of {}, fewer than {m}", self.n),
                );
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("sigma", format!("must be >= 0, got {}", self.noise_sigma));
        }
        if !(self.inlier_threshold > 0.0 && self.inlier_threshold.is_finite()) {
            return bad(
                "threshold",
                format!("must be > 0, got {}", self.inlier_threshold),
            );
        }
        if !(self.outlier_box > 0.0 && self.outlier_box.is_finite()) {
            return bad("box", format!("must be > 0, got {}", self.outlier_box));
        }
        Ok(())
    }
}

/// Default `(noise_sigma, inlier_threshold)` per task.
pub fn default_noise(task: Task) -> (f64, f64) {
    match task {
        Task::Line => (0.5, 1.0),
        Task::Homography => (0.5, 2.0),
    }
}

/// Keys accepted in config files and as `--<key>` flags.
pub const KEYS: [&str; 14] = [
    "task",
    "n",
    "ratios",
    "budget",
    "reps",
    "engines",
    "gamma",
    "delta",
    "pop",
    "seed",
    "out",
    "sigma",
    "threshold",
    "box",
];

/// Raw `key -> value` settings before they are applied to a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines. `#` starts a comment anywhere on a line.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(BenchError::ConfigInvalid {
                    field: format!("line {}", i + 1),
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(BenchError::ConfigInvalid {
                    field: key.to_string(),
                    message: "unknown key".into(),
                });
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), BenchError> {
        if !KEYS.contains(&key) {
            return Err(BenchError::ConfigInvalid {
                field: key.to_string(),
                message: "unknown key".into(),
            });
        }
        self.values.insert(key.to_string(), value.into());
        Ok(())
    }

    /// Later settings win.
    pub fn merge(mut self, over: Settings) -> Self {
        self.values.extend(over.values);
        self
    }

    /// Builds a validated config. Noise defaults follow the chosen task
    /// unless `sigma` or `threshold` are given.
    pub fn to_config(&self) -> Result<BenchConfig, BenchError> {
        let task = match self.values.get("task") {
            Some(v) => parse_field::<Task>("task", v)?,
            None => Task::Line,
        };
        let mut cfg = BenchConfig::new(task);
        for (key, value) in &self.values {
            match key.as_str() {
                "task" => {}
                "n" => cfg.n = parse_field("n", value)?,
                "ratios" => cfg.inlier_ratios = parse_list("ratios", value)?,
                "budget" => cfg.budget = parse_field("budget", value)?,
                "reps" => cfg.repetitions = parse_field("reps", value)?,
                "engines" => {
                    let mut engines: Vec<Engine> = parse_list("engines", value)?;
                    engines.sort();
                    engines.dedup();
                    cfg.engines = engines;
                }
                "gamma" => cfg.params.gamma = parse_field("gamma", value)?,
                "delta" => cfg.params.delta = parse_field("delta", value)?,
                "pop" => cfg.params.population_size = parse_field("pop", value)?,
                "seed" => cfg.base_seed = parse_field("seed", value)?,
                "out" => cfg.output_dir = PathBuf::from(value),
                "sigma" => cfg.noise_sigma = parse_field("sigma", value)?,
                "threshold" => cfg.inlier_threshold = parse_field("threshold", value)?,
                "box" => cfg.outlier_box = parse_field("box", value)?,
                other => unreachable!("key {other} was checked on insert"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T, BenchError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| BenchError::ConfigInvalid {
            field: field.to_string(),
            message: format!("`{value}`: {e}"),
        })
}

fn parse_list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>, BenchError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_field(field, s))
        .collect()
}
