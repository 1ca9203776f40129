//! Fixed-budget engine comparisons on synthetic data.
//!
//! For each inlier ratio and repetition `r`, one dataset is generated with
//! seed `base_seed + r` and every selected engine runs on it with the same
//! seed and budget. Traces are forward-filled to a grid of `budget` model
//! counts and averaged per engine.

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::consensus::{
    run_adaptive_gasac, run_gasac, run_ransac, AdaptiveParams, ConsensusError, RunTrace,
};
use crate::datagen::{self, DatagenError, SyntheticSpec, TaskData};
use crate::estimators::{Dataset, Estimator, HomographyEstimator, LineEstimator};

pub use config::{default_noise, BenchConfig, Engine, Settings, KEYS};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid config field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("summary needs the ransac baseline")]
    MissingBaseline,
    #[error(transparent)]
    Data(#[from] DatagenError),
    #[error(transparent)]
    Engine(#[from] ConsensusError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Engine {
    /// Runs this engine with the harness conventions: RANSAC never stops
    /// early, so every engine spends the same budget.
    pub fn run<E: Estimator>(
        self,
        estimator: &E,
        data: &Dataset<E::Observation>,
        params: &AdaptiveParams,
        budget: usize,
        seed: u64,
    ) -> Result<RunTrace<E::Model>, ConsensusError> {
        match self {
            Engine::Ransac => run_ransac(estimator, data, budget, seed, None),
            Engine::Gasac => run_gasac(estimator, data, params.population_size, budget, seed),
            Engine::Adaptive => run_adaptive_gasac(estimator, data, params, budget, seed),
        }
    }
}

/// Mean best-so-far curve of one engine.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineCurve {
    pub engine: Engine,
    /// `mean[t]` is the mean best inlier count after `t + 1` models.
    pub mean: Vec<f64>,
}

impl EngineCurve {
    pub fn final_score(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }
}

/// All engine curves for one inlier ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub inlier_ratio: f64,
    pub curves: Vec<EngineCurve>,
}

impl AggregateCurve {
    pub fn curve(&self, engine: Engine) -> Option<&EngineCurve> {
        self.curves.iter().find(|c| c.engine == engine)
    }

    /// File name stem, e.g. `curve_10` for a ratio of 0.1.
    pub fn file_name(&self) -> String {
        format!("curve_{}.csv", ratio_percent(self.inlier_ratio))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub engine: Engine,
    pub mean_final_score: f64,
    pub improvement_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub curves: Vec<AggregateCurve>,
    /// Per-ratio summaries, parallel to `curves`.
    pub ratio_summaries: Vec<Vec<SummaryRow>>,
    /// Scores averaged over all ratios.
    pub summary: Vec<SummaryRow>,
}

fn ratio_percent(ratio: f64) -> String {
    let pct = (ratio * 100.0 * 1e6).round() / 1e6;
    format!("{pct}")
}

/// Mean final score per engine and its improvement over RANSAC in percent.
pub fn summarize_final(curves: &[EngineCurve]) -> Result<Vec<SummaryRow>, BenchError> {
    let baseline = curves
        .iter()
        .find(|c| c.engine == Engine::Ransac)
        .ok_or(BenchError::MissingBaseline)?
        .final_score();
    Ok(curves
        .iter()
        .map(|c| {
            let score = c.final_score();
            let improvement_pct = if baseline == 0.0 {
                if score == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (score - baseline) / baseline * 100.0
            };
            SummaryRow {
                engine: c.engine,
                mean_final_score: score,
                improvement_pct,
            }
        })
        .collect())
}

/// Densified traces of every engine for one repetition.
fn run_repetition<E: Estimator>(
    cfg: &BenchConfig,
    estimator: &E,
    data: &Dataset<E::Observation>,
    seed: u64,
) -> Result<Vec<Vec<usize>>, ConsensusError> {
    cfg.engines
        .iter()
        .map(|engine| {
            engine
                .run(estimator, data, &cfg.params, cfg.budget, seed)
                .map(|t| t.densify(cfg.budget))
        })
        .collect()
}

fn synthetic_spec(cfg: &BenchConfig, ratio: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        task: cfg.task,
        n: cfg.n,
        inlier_ratio: ratio,
        noise_sigma: cfg.noise_sigma,
        outlier_box: cfg.outlier_box,
        inlier_threshold: cfg.inlier_threshold,
        seed,
    }
}

/// The dataset repetition `r` uses at `ratio`.
pub fn repetition_data(cfg: &BenchConfig, ratio: f64, r: usize) -> Result<TaskData, DatagenError> {
    datagen::generate(&synthetic_spec(
        cfg,
        ratio,
        cfg.base_seed.wrapping_add(r as u64),
    ))
}

/// Runs the full sweep in memory. Repetitions run in parallel; the
/// reduction is sequential in repetition order, so results do not depend on
/// scheduling.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let mut curves = Vec::with_capacity(cfg.inlier_ratios.len());
    for &ratio in &cfg.inlier_ratios {
        let per_rep: Vec<Vec<Vec<usize>>> = (0..cfg.repetitions)
            .into_par_iter()
            .map(|r| -> Result<_, BenchError> {
                let seed = cfg.base_seed.wrapping_add(r as u64);
                let traces = match repetition_data(cfg, ratio, r)? {
                    TaskData::Line(d) => {
                        run_repetition(cfg, &LineEstimator::new(cfg.inlier_threshold), &d, seed)?
                    }
                    TaskData::Homography(d) => run_repetition(
                        cfg,
                        &HomographyEstimator::new(cfg.inlier_threshold),
                        &d,
                        seed,
                    )?,
                };
                Ok(traces)
            })
            .collect::<Result<_, _>>()?;

        let reps = cfg.repetitions as f64;
        let engine_curves = cfg
            .engines
            .iter()
            .enumerate()
            .map(|(e, &engine)| {
                let mut sum = vec![0u64; cfg.budget];
                for rep in &per_rep {
                    for (s, &v) in sum.iter_mut().zip(&rep[e]) {
                        *s += v as u64;
                    }
                }
                EngineCurve {
                    engine,
                    mean: sum.into_iter().map(|s| s as f64 / reps).collect(),
                }
            })
            .collect();
        curves.push(AggregateCurve {
            inlier_ratio: ratio,
            curves: engine_curves,
        });
    }

    let has_baseline = cfg.engines.contains(&Engine::Ransac);
    let ratio_summaries = if has_baseline {
        curves
            .iter()
            .map(|c| summarize_final(&c.curves))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let pooled: Vec<EngineCurve> = cfg
        .engines
        .iter()
        .map(|&engine| {
            let score = curves
                .iter()
                .filter_map(|c| c.curve(engine))
                .map(EngineCurve::final_score)
                .sum::<f64>()
                / curves.len() as f64;
            EngineCurve {
                engine,
                mean: vec![score],
            }
        })
        .collect();
    let summary = if has_baseline {
        summarize_final(&pooled)?
    } else {
        pooled
            .iter()
            .map(|c| SummaryRow {
                engine: c.engine,
                mean_final_score: c.final_score(),
                improvement_pct: f64::NAN,
            })
            .collect()
    };
    Ok(BenchReport {
        curves,
        ratio_summaries,
        summary,
    })
}

pub fn write_curve<W: Write>(curve: &AggregateCurve, mut out: W) -> io::Result<()> {
    let header: Vec<&str> = std::iter::once("models")
        .chain(curve.curves.iter().map(|c| c.engine.name()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let len = curve.curves.first().map_or(0, |c| c.mean.len());
    for t in 0..len {
        write!(out, "{}", t + 1)?;
        for c in &curve.curves {
            write!(out, ",{:.4}", c.mean[t])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], mut out: W) -> io::Result<()> {
    writeln!(out, "engine,mean_final_score,improvement_pct")?;
    for row in rows {
        writeln!(
            out,
            "{},{:.4},{:.1}",
            row.engine, row.mean_final_score, row.improvement_pct
        )?;
    }
    Ok(())
}

/// Writes `curve_<pct>.csv` per ratio, `summary_<pct>.csv` per ratio and the
/// pooled `summary.csv`. Every file is rendered before the first one is
/// written.
pub fn write_report(report: &BenchReport, dir: &Path) -> io::Result<Vec<String>> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for (i, curve) in report.curves.iter().enumerate() {
        let mut buf = Vec::new();
        write_curve(curve, &mut buf)?;
        files.push((curve.file_name(), buf));
        if let Some(rows) = report.ratio_summaries.get(i) {
            let mut buf = Vec::new();
            write_summary(rows, &mut buf)?;
            files.push((
                format!("summary_{}.csv", ratio_percent(curve.inlier_ratio)),
                buf,
            ));
        }
    }
    let mut buf = Vec::new();
    write_summary(&report.summary, &mut buf)?;
    files.push(("summary.csv".to_string(), buf));

    fs::create_dir_all(dir)?;
    for (name, bytes) in &files {
        fs::write(dir.join(name), bytes)?;
    }
    Ok(files.into_iter().map(|(name, _)| name).collect())
}
