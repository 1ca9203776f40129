use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adasac::bench::{run_benchmark, write_report, BenchError, Engine, Settings};
use adasac::consensus::AdaptiveParams;
use adasac::datagen::{read_dataset, TaskData};
use adasac::estimators::{
    count_inliers, Dataset, Estimator, HomographyEstimator, LineEstimator, ModelParams,
};

#[derive(Parser)]
#[command(
    name = "adasac",
    version,
    about = "Robust fitting with adaptive genetic sample consensus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare engines on synthetic data at a fixed model budget.
    Bench(Box<BenchArgs>),
    /// Run one engine on a CSV dataset.
    Fit(FitArgs),
}

/// Flags are kept as strings so that every value goes through the same
/// validation as config files.
#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    engines: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    pop: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Inlier noise standard deviation.
    #[arg(long)]
    sigma: Option<String>,
    /// Inlier residual threshold.
    #[arg(long)]
    threshold: Option<String>,
    /// Half-width of the region points are drawn from.
    #[arg(long = "box")]
    outlier_box: Option<String>,
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with header `x,y[,label]` or `x1,y1,x2,y2[,label]`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "adaptive")]
    engine: Engine,
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, default_value_t = 400)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    pop: usize,
}

fn bench_settings(args: &BenchArgs) -> Result<Settings, BenchError> {
    let base = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| BenchError::ConfigInvalid {
                field: "config".into(),
                message: format!("{}: {e}", path.display()),
            })?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    let mut flags = Settings::default();
    let pairs = [
        ("task", &args.task),
        ("n", &args.n),
        ("ratios", &args.ratios),
        ("budget", &args.budget),
        ("reps", &args.reps),
        ("engines", &args.engines),
        ("gamma", &args.gamma),
        ("delta", &args.delta),
        ("pop", &args.pop),
        ("seed", &args.seed),
        ("out", &args.out),
        ("sigma", &args.sigma),
        ("threshold", &args.threshold),
        ("box", &args.outlier_box),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            flags.set(key, v.clone())?;
        }
    }
    Ok(base.merge(flags))
}

fn bench(args: &BenchArgs) -> ExitCode {
    let result = bench_settings(args)
        .and_then(|s| s.to_config())
        .and_then(|cfg| {
            let report = run_benchmark(&cfg)?;
            let files = write_report(&report, &cfg.output_dir)?;
            Ok((cfg, report, files))
        });
    match result {
        Ok((cfg, report, files)) => {
            for f in &files {
                println!("wrote {}", cfg.output_dir.join(f).display());
            }
            for row in &report.summary {
                println!(
                    "{:<9} mean final score {:>9.3}  improvement {:>6.1}%",
                    row.engine, row.mean_final_score, row.improvement_pct
                );
            }
            ExitCode::SUCCESS
        }
        Err(e @ BenchError::ConfigInvalid { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn fit_with<E: Estimator>(
    estimator: &E,
    data: &Dataset<E::Observation>,
    args: &FitArgs,
    params: &AdaptiveParams,
) -> Result<(), String> {
    let trace = args
        .engine
        .run(estimator, data, params, args.budget, args.seed)
        .map_err(|e| e.to_string())?;
    println!("engine: {}", args.engine);
    println!("models: {}", trace.models_generated());
    println!("sample: {:?}", trace.best_chromosome.genes());
    match &trace.best_model {
        Some(model) => {
            let params: Vec<String> = model.parameters().iter().map(|v| format!("{v}")).collect();
            println!("model: {}", params.join(" "));
            println!("inliers: {}", count_inliers(estimator, model, data));
        }
        None => {
            println!("model: none");
            println!("inliers: 0");
        }
    }
    Ok(())
}

fn fit(args: &FitArgs) -> ExitCode {
    let run = || -> Result<(), String> {
        if !(args.threshold > 0.0 && args.threshold.is_finite()) {
            return Err(format!("threshold must be > 0, got {}", args.threshold));
        }
        let file = File::open(&args.input).map_err(|e| format!("{}: {e}", args.input.display()))?;
        let data = read_dataset(BufReader::new(file)).map_err(|e| e.to_string())?;
        let params = AdaptiveParams {
            gamma: args.gamma,
            delta: args.delta,
            population_size: args.pop,
            ..AdaptiveParams::default()
        };
        match &data {
            TaskData::Line(d) => fit_with(&LineEstimator::new(args.threshold), d, args, &params),
            TaskData::Homography(d) => {
                fit_with(&HomographyEstimator::new(args.threshold), d, args, &params)
            }
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Bench(args) => bench(args),
        Command::Fit(args) => fit(args),
    }
}
