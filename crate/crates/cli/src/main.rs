//! `inner-range`: paving, rank extraction and rank benchmarks from the
//! command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no certifiable rank profile,
//! 4 paving truncated by `--max-boxes`, 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use inner_range::experiment::{
    boxes_csv, render_svg, run_rank_bench, Family, PaveProblem, Preset, RankBenchSpec,
};
use inner_range::paver::PaverConfig;
use inner_range::rank::{rank_profile, RankOptions, Strategy};
use inner_range::{Error, Execution, FunctionModel, IntervalBox};

#[derive(Parser)]
#[command(name = "inner-range", version, about = "Certified inner approximation of function ranges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pave the range of a function.
    Pave(PaveArgs),
    /// Certified rank profile of a function's Jacobian over a box.
    Rank(RankArgs),
    /// Compare the rank extractors on random interval matrices.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Built-in problem.
    #[arg(long, value_parser = parse_preset, conflicts_with_all = ["function", "domain"])]
    preset: Option<Preset>,
    /// Function source text, or a file containing it.
    #[arg(long, requires = "domain")]
    function: Option<String>,
    /// Domain box as JSON, e.g. `[[-2,2],[-2,2]]`.
    #[arg(long)]
    domain: Option<String>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    #[arg(long, default_value = "best-of", value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory receiving one file per format; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; repeatable.
    #[arg(long, value_enum)]
    format: Vec<Format>,
}

#[derive(Args)]
struct PaveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Minimum domain box width.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_boxes: Option<usize>,
    /// Process boxes on the calling thread only.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "embedded")]
    family: FamilyArg,
    /// Thickening half-width of the rotated family.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    #[arg(long, default_value_t = 8)]
    size: usize,
    /// Ranks to test, comma separated; defaults to 2..=size.
    #[arg(long, value_delimiter = ',')]
    ranks: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random draws per candidate size of the random extractor.
    #[arg(long, default_value_t = inner_range::rank::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Include mean run times; makes the report machine dependent.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Embedded,
    Rotated,
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_param(s: &str) -> std::result::Result<(String, String), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    Ok((name.trim().to_string(), value.trim().to_string()))
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::ProfileUnavailable) => 3,
            Some(Error::InternalCertification(_) | Error::SoundnessViolation(_)) => 1,
            Some(_) => 2,
            None => 1,
        };
        Failure { code, error }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input_error(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Pave(args) => pave(args),
        Command::Rank(args) => rank(args),
        Command::Bench(args) => bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_problem(args: &ProblemArgs) -> Outcome<PaveProblem> {
    let mut problem = match (&args.preset, &args.function, &args.domain) {
        (Some(preset), _, _) => preset.problem(&args.params).map_err(anyhow::Error::from)?,
        (None, Some(function), Some(domain)) => {
            let text = if Path::new(function).is_file() {
                fs::read_to_string(function)
                    .with_context(|| format!("reading {function}"))
                    .map_err(input_error)?
            } else {
                function.clone()
            };
            let function =
                FunctionModel::parse_with_params(&text, &args.params).map_err(anyhow::Error::from)?;
            let domain: IntervalBox = serde_json::from_str(domain)
                .context("domain must be a JSON list of [lo, hi] pairs")
                .map_err(input_error)?;
            if domain.dim() != function.dim_in() {
                return Err(input_error(anyhow!(
                    "domain has {} components but the function takes {} inputs",
                    domain.dim(),
                    function.dim_in()
                )));
            }
            PaveProblem {
                function,
                domain,
                config: PaverConfig::default(),
            }
        }
        _ => return Err(input_error(anyhow!("give either --preset or --function with --domain"))),
    };
    problem.config.strategy = args.strategy;
    problem.config.seed = args.seed;
    Ok(problem)
}

/// Writes each rendering to `<out>/<stem>.<ext>` or, without `--out`, the
/// first one to stdout.
fn emit(
    output: &OutputArgs,
    stem: &str,
    default: Format,
    render: impl Fn(Format) -> Outcome<String>,
) -> Outcome<()> {
    let formats = if output.format.is_empty() {
        vec![default]
    } else {
        output.format.clone()
    };
    match &output.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for f in formats {
                let path = dir.join(format!("{stem}.{}", f.extension()));
                fs::write(&path, render(f)?).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => print!("{}", render(formats[0])?),
    }
    Ok(())
}

fn unsupported(f: Format, command: &str) -> Failure {
    input_error(anyhow!("format {} is not available for {command}", f.extension()))
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn pave(args: PaveArgs) -> Outcome<u8> {
    let mut problem = load_problem(&args.problem)?;
    if let Some(eps) = args.epsilon {
        problem.config.epsilon = eps;
    }
    if let Some(max) = args.max_boxes {
        problem.config.max_boxes = max;
    }
    problem.config.execution = execution(args.sequential);
    let result = problem.run().map_err(anyhow::Error::from)?;
    let s = &result.stats;
    eprintln!(
        "inside {} boundary {} processed {} in {:.3}s{}",
        result.inside.len(),
        result.boundary.len(),
        s.boxes_processed,
        result.wall_time.as_secs_f64(),
        if s.truncated { " (truncated)" } else { "" }
    );
    emit(&args.output, "pave", Format::Json, |f| {
        Ok(match f {
            Format::Json => with_newline(result.to_json()),
            Format::Csv => boxes_csv(&result),
            Format::Svg => render_svg(&result),
        })
    })?;
    Ok(if s.truncated { 4 } else { 0 })
}

fn rank(args: RankArgs) -> Outcome<u8> {
    let problem = load_problem(&args.problem)?;
    let jac = problem
        .function
        .jacobian_interval(&problem.domain)
        .map_err(anyhow::Error::from)?;
    let opts = RankOptions {
        seed: args.problem.seed,
        ..RankOptions::default()
    };
    let profile = rank_profile(&jac, args.problem.strategy, &opts).map_err(anyhow::Error::from)?;
    emit(&args.output, "rank", Format::Json, |f| match f {
        Format::Json => Ok(with_newline(
            serde_json::to_string_pretty(&profile).context("serializing the profile")?,
        )),
        other => Err(unsupported(other, "rank")),
    })?;
    Ok(if profile.rank == 0 { 3 } else { 0 })
}

fn bench(args: BenchArgs) -> Outcome<u8> {
    let family = match args.family {
        FamilyArg::Embedded => Family::EmbeddedDominant,
        FamilyArg::Rotated => Family::Rotated { delta: args.delta },
    };
    let ranks = if args.ranks.is_empty() {
        (2.min(args.size)..=args.size).collect()
    } else {
        args.ranks.clone()
    };
    let spec = RankBenchSpec {
        family,
        size: args.size,
        ranks,
        trials: args.trials,
        seed: args.seed,
        max_iter: args.max_iter,
        timings: args.timings,
        execution: execution(args.sequential),
    };
    let report = run_rank_bench(&spec).map_err(anyhow::Error::from)?;
    emit(&args.output, "bench", Format::Json, |f| match f {
        Format::Json => Ok(with_newline(report.to_json())),
        Format::Csv => Ok(report.to_csv()),
        other => Err(unsupported(other, "bench")),
    })?;
    Ok(0)
}
