//! `ecertify` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ecertify::bounds::{compute, BoundMethod, BoundRequest, Proxy};
use ecertify::harness::bench::{bench_tables, write_csv, BenchGrid};
use ecertify::harness::coverage::{coverage_experiment, CoverageSpec};
use ecertify::harness::document::{BoundDocument, BoundEntry, ResultDocument, SCHEMA_VERSION};
use ecertify::harness::run::{run_certify, BlackBoxSource, ExplanationSource, LinearExplanationFile, RunSpec};
use ecertify::harness::stability::stability_metrics;
use ecertify::{BPolicy, BlackBox, DriverConfig, Explanation, Point, StrategyConfig, StrategyKind};

#[derive(Parser)]
#[command(name = "ecertify", version, about = "Certify trust regions of local explanations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the largest certified half-width around x0.
    Certify(CertifyArgs),
    /// Probability lower bounds for a result document.
    Bounds(BoundsArgs),
    /// Synthetic benchmark grid.
    Bench(BenchArgs),
    /// Query savings from reusing certified explanations across a dataset.
    Coverage(CoverageArgs),
    /// Top-k intersection and Spearman correlation between explanations.
    Stability(StabilityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Unif,
    Unifi,
    Adapti,
    #[value(name = "unifi-iid")]
    UnifiIid,
}

impl From<StrategyArg> for StrategyKind {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Unif => StrategyKind::Unif,
            StrategyArg::Unifi => StrategyKind::UnifI,
            StrategyArg::Adapti => StrategyKind::AdaptI,
            StrategyArg::UnifiIid => StrategyKind::UnifIiid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Min,
    Max,
    Mean,
}

impl From<PolicyArg> for BPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Min => BPolicy::Min,
            PolicyArg::Max => BPolicy::Max,
            PolicyArg::Mean => BPolicy::Mean,
        }
    }
}

#[derive(Args)]
struct BlackBoxArgs {
    /// Built-in black box.
    #[arg(long, default_value = "pwl", conflicts_with = "blackbox_cmd")]
    blackbox: String,
    /// Command for an external black box speaking JSON lines on stdin/stdout.
    #[arg(long)]
    blackbox_cmd: Option<String>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

impl BlackBoxArgs {
    fn source(&self) -> Result<BlackBoxSource> {
        Ok(match &self.blackbox_cmd {
            Some(cmd) => {
                let argv = shlex::split(cmd).context("unbalanced quotes in --blackbox-cmd")?;
                if argv.is_empty() {
                    bail!("--blackbox-cmd is empty");
                }
                BlackBoxSource::Command { argv, dim: self.dim }
            }
            None => BlackBoxSource::Builtin { name: self.blackbox.clone(), dim: self.dim },
        })
    }
}

#[derive(Args)]
struct DriverArgs {
    #[arg(long, default_value_t = 0.75)]
    theta: f64,
    #[arg(long, value_enum, default_value = "adapti")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    #[arg(long, default_value_t = 10)]
    regions: u32,
    #[arg(long, default_value_t = 0.0)]
    lb: f64,
    #[arg(long, default_value_t = 1.0)]
    ub: f64,
    #[arg(long, value_enum, default_value = "min")]
    b_policy: PolicyArg,
    /// Standard deviation of prototype perturbations.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl DriverArgs {
    fn config(&self, seed: u64) -> DriverConfig {
        DriverConfig {
            regions: self.regions,
            initial_lb: self.lb,
            initial_ub: self.ub,
            theta: self.theta,
            strategy: StrategyConfig { sigma: self.sigma, ..StrategyConfig::new(self.strategy.into(), self.budget, seed) },
            b_policy: self.b_policy.into(),
            ..DriverConfig::default()
        }
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    blackbox: BlackBoxArgs,
    #[command(flatten)]
    driver: DriverArgs,
    /// Example to explain, comma separated; the origin by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Linear explanation coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["explanation", "slope"])]
    alpha: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    intercept: f64,
    /// JSON file `{"alpha": [...], "intercept": c}`.
    #[arg(long, conflicts_with = "slope")]
    explanation: Option<PathBuf>,
    /// Slope of the default explanation `slope · Σ x_i`.
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Omit wall-clock times so documents are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Evaluate sample batches on the rayon pool.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct BoundsArgs {
    /// Result document written by `certify`.
    input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// `theta`, `fhat`, or a known true minimum.
    #[arg(long, default_value = "theta", allow_hyphen_values = true)]
    proxy: String,
    /// `theorem1` or `evt`.
    #[arg(long, default_value = "theorem1")]
    method: String,
    /// EVT tail exponent; d/2 by default.
    #[arg(long)]
    kappa: Option<f64>,
    /// Report the EVT ε-width at this confidence.
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1")]
    dim: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    budget: Vec<u64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "unif,unifi,adapti")]
    strategy: Vec<StrategyArg>,
    #[arg(long, default_value_t = 0.75)]
    theta: f64,
    #[arg(long, default_value_t = 0.75, allow_hyphen_values = true)]
    slope: f64,
    #[arg(long, default_value_t = 10)]
    regions: u32,
    #[arg(long, default_value_t = 0.0)]
    lb: f64,
    #[arg(long, default_value_t = 1.0)]
    ub: f64,
    #[arg(long, value_enum, default_value = "min")]
    b_policy: PolicyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    repeat: usize,
    /// Run grid cells on the rayon pool.
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct CoverageArgs {
    #[command(flatten)]
    blackbox: BlackBoxArgs,
    #[command(flatten)]
    driver: DriverArgs,
    /// JSON array of points.
    #[arg(long)]
    data: PathBuf,
    /// JSON array of `{"alpha": [...], "intercept": c}`, one per point.
    #[arg(long)]
    explanations: PathBuf,
    #[arg(long, default_value_t = 0.6)]
    top_fraction: f64,
    #[arg(long, default_value_t = 5000.0)]
    nominal_cost: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    /// JSON array of coefficient vectors; the first is the reference.
    #[arg(long)]
    explanations: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn certify(args: CertifyArgs) -> Result<()> {
    if args.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    let explanation = match (&args.alpha, &args.explanation) {
        (Some(alpha), _) => ExplanationSource::Linear { alpha: alpha.clone(), intercept: args.intercept },
        (None, Some(path)) => ExplanationSource::File(path.clone()),
        (None, None) => ExplanationSource::Hyperplane { slope: args.slope.unwrap_or(0.75) },
    };
    let spec = RunSpec {
        blackbox: args.blackbox.source()?,
        explanation,
        x0: args.x0.clone(),
        driver: args.driver.config(args.seed),
        seeds: RunSpec::seed_list(args.seed, args.repeat),
        record_timing: !args.no_timing,
        parallel: args.parallel,
    };
    let doc = run_certify(&spec)?;
    let text = match args.format {
        Format::Json => doc.to_json()?,
        Format::Csv => csv_string(
            &["seed", "w", "x0_fidelity", "total_queries", "regions", "f_hat_star_w", "globally_certified", "wall_clock_secs"],
            |w| {
                for r in &doc.runs {
                    w.write_record([
                        r.seed.to_string(),
                        r.w.to_string(),
                        r.x0_fidelity.to_string(),
                        r.total_queries.to_string(),
                        r.regions.len().to_string(),
                        opt(r.f_hat_star_w),
                        r.globally_certified.to_string(),
                        opt(r.wall_clock_secs),
                    ])?;
                }
                Ok(())
            },
        )?,
    };
    emit(args.out.as_deref(), &text)
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let doc = ResultDocument::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let request = BoundRequest {
        epsilon: args.epsilon,
        proxy: args.proxy.parse::<Proxy>()?,
        method: args.method.parse::<BoundMethod>()?,
        kappa: args.kappa,
        confidence: args.confidence,
    };
    let mut entries = Vec::with_capacity(doc.runs.len());
    for run in &doc.runs {
        let start = Instant::now();
        let outcome = run.to_report().and_then(|report| compute(&report, &request));
        let compute_secs = start.elapsed().as_secs_f64();
        entries.push(match outcome {
            Ok(result) => BoundEntry { seed: run.seed, result: Some(result), error: None, compute_secs },
            Err(e) => {
                log::warn!("seed {}: {e}", run.seed);
                BoundEntry { seed: run.seed, result: None, error: Some(e.to_string()), compute_secs }
            }
        });
    }
    let out = BoundDocument { schema_version: SCHEMA_VERSION, bounds: entries };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&out)?,
        Format::Csv => csv_string(&["seed", "probability_lower_bound", "evaluation_point", "compute_secs", "error"], |w| {
            for b in &out.bounds {
                w.write_record([
                    b.seed.to_string(),
                    opt(b.result.as_ref().map(|r| r.probability_lower_bound)),
                    opt(b.result.as_ref().map(|r| r.evaluation_point)),
                    b.compute_secs.to_string(),
                    b.error.clone().unwrap_or_default(),
                ])?;
            }
            Ok(())
        })?,
    };
    emit(args.out.as_deref(), &text)
}

fn bench(args: BenchArgs) -> Result<()> {
    if args.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    let grid = BenchGrid {
        dims: args.dim,
        budgets: args.budget,
        strategies: args.strategy.into_iter().map(Into::into).collect(),
        seeds: RunSpec::seed_list(args.seed, args.repeat),
        slope: args.slope,
        driver: DriverConfig {
            regions: args.regions,
            initial_lb: args.lb,
            initial_ub: args.ub,
            theta: args.theta,
            b_policy: args.b_policy.into(),
            ..DriverConfig::default()
        },
        parallel: args.parallel,
    };
    let cells = bench_tables(&grid)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&cells)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&cells, &mut buf)?;
            String::from_utf8(buf)?
        }
    };
    emit(args.out.as_deref(), &text)
}

fn coverage(args: CoverageArgs) -> Result<()> {
    let raw: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(&args.data)?)?;
    let dataset = raw.into_iter().map(Point::new).collect::<ecertify::Result<Vec<_>>>()?;
    let explanations: Vec<LinearExplanationFile> = serde_json::from_str(&std::fs::read_to_string(&args.explanations)?)?;
    if explanations.len() != dataset.len() {
        bail!("{} explanations for {} points", explanations.len(), dataset.len());
    }
    let model = args.blackbox.source()?.resolve()?;
    let blackbox = BlackBox::from_arc(model);
    let lookup = |x: &Point| -> ecertify::Result<Explanation> {
        let i = dataset
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| ecertify::Error::InvalidArgument("point not in dataset".into()))?;
        Ok(Explanation::linear(explanations[i].alpha.clone(), explanations[i].intercept))
    };
    let spec = CoverageSpec {
        dataset: dataset.clone(),
        theta: args.driver.theta,
        top_fraction: args.top_fraction,
        nominal_cost: args.nominal_cost,
        seed: args.seed,
    };
    let report = coverage_experiment(&spec, &blackbox, &lookup, &args.driver.config(args.seed))?;
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

fn stability(args: StabilityArgs) -> Result<()> {
    let all: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(&args.explanations)?)?;
    let Some((reference, others)) = all.split_first() else {
        bail!("no explanations in {}", args.explanations.display());
    };
    let report = stability_metrics(reference, others, args.k)?;
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Certify(a) => certify(a),
        Command::Bounds(a) => bounds(a),
        Command::Bench(a) => bench(a),
        Command::Coverage(a) => coverage(a),
        Command::Stability(a) => stability(a),
    }
}
