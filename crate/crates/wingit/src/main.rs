use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wingit::error::Error;
use wingit::experiments::{
    format_float, run_corpus_experiment, run_mse_experiment, write_results, ExperimentSpec,
    SourceSpec, TauLabel,
};
use wingit::functionals::CountThreshold;
use wingit::markov::{build_sticky_chain, sample_trajectory, Distribution};
use wingit::rng::Seed;
use wingit::text::{parse_collocation_rules, read_trajectory_file, tokenize};
use wingit::tuning::{tune_window, TuneConfig};
use wingit::{
    good_turing, good_turing_small_count, wingit as wingit_estimate, wingit_naive,
    wingit_small_count, wingit_small_count_naive, WindowSize,
};

#[derive(Parser)]
#[command(
    name = "wingit",
    about = "Missing-mass and small-count-mass estimation for Markovian sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a chain trajectory to a token-per-line file.
    Simulate(SimulateArgs),
    /// Run an estimator on a trajectory file.
    Estimate(EstimateArgs),
    /// Select a window size by split-and-validate.
    Tune(TuneArgs),
    /// Run an experiment spec to CSV (+ JSON provenance).
    Experiment(ExperimentArgs),
    /// Corpus preparation and corpus-driven experiments.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainKind {
    Sticky,
    Iid,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    chain: ChainKind,
    /// Resampling probability for sticky chains.
    #[arg(long)]
    p: Option<f64>,
    /// Stationary family descriptor, e.g. uniform:600.
    #[arg(long)]
    alphabet: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorKind {
    Gt,
    Wingit,
    WingitNaive,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    estimator: EstimatorKind,
    /// Window size (required for the windowed estimators).
    #[arg(long)]
    tau: Option<usize>,
    /// Count threshold; routes to the small-count variants.
    #[arg(long)]
    zeta: Option<usize>,
    /// Parse input lines as integer symbol ids instead of interning.
    #[arg(long)]
    numeric: bool,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    input: PathBuf,
    /// Slack constant in the selection criterion.
    #[arg(long, default_value_t = 1.0)]
    ctune: f64,
    #[arg(long)]
    numeric: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    #[command(subcommand)]
    action: CorpusAction,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Tokenize a text and write the token cache + JSON sidecar.
    Prepare(CorpusPrepareArgs),
    /// Run the doubling-n missing-mass grid against the corpus.
    Experiment(CorpusExperimentArgs),
}

#[derive(Args)]
struct CorpusPrepareArgs {
    #[arg(long)]
    text: PathBuf,
    #[arg(long)]
    collocations: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusExperimentArgs {
    #[arg(long)]
    text: PathBuf,
    #[arg(long)]
    collocations: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated window lengths; defaults to 600 doubling to 19200.
    #[arg(long)]
    n_grid: Option<String>,
    /// Window size used on each extracted trajectory.
    #[arg(long, default_value_t = 1)]
    tau: usize,
}

/// Failures split by exit code: 2 for bad flag values, 1 for runtime.
enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn parse_alphabet(desc: &str) -> Result<Distribution, CliError> {
    let Some(k) = desc
        .strip_prefix("uniform:")
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k >= 1)
    else {
        return usage(format!(
            "--alphabet: expected `uniform:K` with K >= 1, got `{desc}`"
        ));
    };
    Ok(Distribution::uniform(k)?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let pi = parse_alphabet(&args.alphabet)?;
    let k = pi.len();
    let p = match args.chain {
        ChainKind::Iid => 1.0,
        ChainKind::Sticky => match args.p {
            Some(p) if p > 0.0 && p <= 1.0 => p,
            Some(p) => return usage(format!("--p: must lie in (0, 1], got {p}")),
            None => return usage("--p: required for sticky chains"),
        },
    };
    if args.n == 0 {
        return usage("--n: must be at least 1");
    }
    let model = build_sticky_chain(p, pi)?;
    let x = sample_trajectory(&model, args.n, Seed(args.seed))?;
    let mut body = String::with_capacity(x.len() * 4);
    for &s in x.symbols() {
        body.push_str(&s.to_string());
        body.push('\n');
    }
    std::fs::write(&args.out, body).map_err(Error::from)?;
    eprintln!("n={} alphabet={k}", args.n);
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let x = read_trajectory_file(&args.input, args.numeric)?;
    let need_tau = || -> Result<WindowSize, CliError> {
        match args.tau {
            Some(t) if t >= 1 && t <= x.len() => Ok(WindowSize(t)),
            Some(t) => usage(format!("--tau: must lie in [1, {}], got {t}", x.len())),
            None => usage("--tau: required for the windowed estimators"),
        }
    };
    let value = match (args.estimator, args.zeta) {
        (EstimatorKind::Gt, None) => good_turing(&x),
        (EstimatorKind::Gt, Some(z)) => good_turing_small_count(&x, CountThreshold(z)),
        (EstimatorKind::Wingit, None) => wingit_estimate(&x, need_tau()?)?,
        (EstimatorKind::Wingit, Some(z)) => {
            wingit_small_count(&x, need_tau()?, CountThreshold(z))?
        }
        (EstimatorKind::WingitNaive, None) => wingit_naive(&x, need_tau()?)?,
        (EstimatorKind::WingitNaive, Some(z)) => {
            wingit_small_count_naive(&x, need_tau()?, CountThreshold(z))?
        }
    };
    println!("{}", format_float(value.value()));
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<(), CliError> {
    if !(args.ctune > 0.0) {
        return usage(format!("--ctune: must be positive, got {}", args.ctune));
    }
    let x = read_trajectory_file(&args.input, args.numeric)?;
    let cfg = TuneConfig::with_c_tune(x.len(), args.ctune)?;
    let m = x.len() / 3;
    let result = tune_window(&x, &cfg)?;
    println!("tau_hat={}", result.tau_hat.0);
    println!("holdout={}", format_float(result.holdout_estimate));
    for (tau, lhs) in &result.criterion_values {
        let rhs = args.ctune * *tau as f64 / m as f64;
        println!("tau={tau} lhs={} rhs={}", format_float(*lhs), format_float(rhs));
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(Error::from)?;
    let spec: ExperimentSpec = serde_json::from_str(&text).map_err(Error::from)?;
    spec.validate()?;
    let rows = run_mse_experiment(&spec)?;
    write_results(&args.out, &spec, &rows)?;
    Ok(())
}

fn load_corpus(
    text_path: &PathBuf,
    collocations: &Option<PathBuf>,
) -> Result<wingit::text::Corpus, CliError> {
    let text = std::fs::read_to_string(text_path).map_err(Error::from)?;
    let rules = match collocations {
        Some(path) => {
            parse_collocation_rules(&std::fs::read_to_string(path).map_err(Error::from)?)?
        }
        None => Vec::new(),
    };
    Ok(tokenize(&text, &rules)?)
}

fn cmd_corpus(args: CorpusArgs) -> Result<(), CliError> {
    match args.action {
        CorpusAction::Prepare(a) => {
            let corpus = load_corpus(&a.text, &a.collocations)?;
            corpus.write_cache(&a.out)?;
            eprintln!(
                "tokens={} vocabulary={}",
                corpus.len(),
                corpus.vocabulary_size()
            );
            Ok(())
        }
        CorpusAction::Experiment(a) => {
            let corpus = load_corpus(&a.text, &a.collocations)?;
            let n_grid = match &a.n_grid {
                Some(raw) => {
                    let mut grid = Vec::new();
                    for part in raw.split(',') {
                        match part.trim().parse::<usize>() {
                            Ok(n) if n >= 1 => grid.push(n),
                            _ => {
                                return usage(format!(
                                    "--n-grid: `{part}` is not a positive integer"
                                ))
                            }
                        }
                    }
                    grid
                }
                None => std::iter::successors(Some(600usize), |n| Some(n * 2))
                    .take_while(|&n| n <= 19200)
                    .collect(),
            };
            for &n in &n_grid {
                if n > corpus.len() {
                    return usage(format!(
                        "--n-grid: n = {n} exceeds corpus length {}",
                        corpus.len()
                    ));
                }
            }
            if a.tau == 0 {
                return usage("--tau: must be at least 1");
            }
            // Windows are the trials; the seed is unused for corpus runs.
            let spec = ExperimentSpec {
                source: SourceSpec::Corpus { path: a.text.display().to_string() },
                n_grid,
                tau_list: vec![TauLabel::Fixed(a.tau)],
                zeta: 0,
                trials: 1,
                base_seed: Seed(0),
            };
            let rows = run_corpus_experiment(&corpus, &spec)?;
            write_results(&a.out, &spec, &rows)?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Corpus(args) => cmd_corpus(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
