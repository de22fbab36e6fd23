mod commands;
mod source;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcda::eval::{default_gamma_grid, Method, ParamChoice};
use mcda::io::CsvSchema;
use mcda::{Error, ErrorKind, Result};

use source::{Generator, Source};

#[derive(Parser, Debug)]
#[command(name = "mcda", version, about = "Discriminant projections: fit, transform, evaluate, benchmark")]
struct Cli {
    /// Log solver progress to standard error (-v info, -vv per-iteration).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit one method and write the projection matrix plus a fit report.
    Fit(FitArgs),
    /// Project a dataset with a previously fitted matrix.
    Transform(TransformArgs),
    /// Cross-validated KNN evaluation of one or more methods.
    Evaluate(EvaluateArgs),
    /// Every method over repeated seeds, summarized in CSV tables.
    Benchmark(BenchmarkArgs),
    /// Null-space toy: NLDA vs MCDA at k = 2, with both projection dumps.
    DemoToy(DemoArgs),
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// CSV dataset (`label` column or `label_*` indicator columns).
    #[arg(long, conflicts_with = "generate")]
    data: Option<PathBuf>,

    /// Seeded generator: toy, toy:K,per,p,intrinsic,noise, mixture:K,per,p,sep, multilabel:L,n,p.
    #[arg(long)]
    generate: Option<Generator>,

    /// How to read label columns in --data.
    #[arg(long, value_enum, default_value_t = Schema::Detect)]
    schema: Schema,

    /// Seed for generators, fold splits and tuning.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DataArgs {
    fn source(&self) -> Result<Source> {
        Source::new(self.data.clone(), self.generate.clone(), self.schema.into())
    }
}

#[derive(Args, Debug, Clone)]
struct MethodArgs {
    /// MCDA gamma: a number, `auto` (balancing heuristic) or `tune` (inner CV over 1e-10..1e10).
    #[arg(long, default_value = "auto", value_parser = parse_param)]
    gamma: ParamChoice,

    /// RLDA/OLDA regularizer: a number, `auto` or `tune`.
    #[arg(long, default_value = "auto", value_parser = parse_param)]
    mu: ParamChoice,

    /// Neighbors for KNN scoring (also used by tuning).
    #[arg(long, default_value_t = 3)]
    knn: usize,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_method, default_value = "mcda")]
    method: Method,
    /// Subspace dimension; defaults to K - 1.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    params: MethodArgs,
    /// Output directory (projection.csv, report.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Projection matrix written by `fit`.
    #[arg(long)]
    projection: PathBuf,
    /// Output directory (projected.csv).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Methods to evaluate, comma-separated.
    #[arg(long, value_parser = parse_method, value_delimiter = ',', default_value = "mcda")]
    method: Vec<Method>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    params: MethodArgs,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Sweep subspace dimensions a..b instead of a single k (writes sweep.csv).
    #[arg(long, value_parser = parse_dims, conflicts_with = "k")]
    dims: Option<RangeInclusive<usize>>,
    /// Output directory (<method>.json, or sweep.csv with --dims).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Methods to run, comma-separated; all of them by default.
    #[arg(long, value_parser = parse_method, value_delimiter = ',')]
    method: Vec<Method>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    params: MethodArgs,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Number of seeds, starting at --seed. Generated data is redrawn per seed.
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    /// Output directory (benchmark.csv, summary.csv).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ambient noise of the toy; 0 gives exactly identical points per class.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Output directory (nlda.csv, mcda.csv, summary.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Schema {
    Detect,
    Single,
    Multi,
}

impl From<Schema> for CsvSchema {
    fn from(s: Schema) -> Self {
        match s {
            Schema::Detect => CsvSchema::Detect,
            Schema::Single => CsvSchema::SingleLabel,
            Schema::Multi => CsvSchema::MultiLabel,
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_param(s: &str) -> std::result::Result<ParamChoice, String> {
    match s {
        "auto" => Ok(ParamChoice::Auto),
        "tune" => Ok(ParamChoice::Tune(default_gamma_grid())),
        _ => match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(ParamChoice::Fixed(v)),
            _ => Err(format!("expected a positive number, 'auto' or 'tune', got '{s}'")),
        },
    }
}

fn parse_dims(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad lower bound in '{s}'"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad upper bound in '{s}'"))?;
    if a == 0 || a > b {
        return Err(format!("need 1 <= a <= b, got '{s}'"));
    }
    Ok(a..=b)
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Infeasible => 4,
        ErrorKind::Numerical => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Transform(a) => commands::transform(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Benchmark(a) => commands::benchmark(a),
        Command::DemoToy(a) => commands::demo_toy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
