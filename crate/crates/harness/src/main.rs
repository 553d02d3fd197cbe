use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use mmnlearn_core::bench::BenchmarkSpec;
use mmnlearn_core::learn::{Abstraction, Algorithm, CaParams, DepthBound, Memo};
use mmnlearn_core::oracle::EqTestConfig;
use mmnlearn_harness::{
    report, run_batch, run_instance, serialize_learned, Batch, ExperimentConfig, Format, Validation,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_CONFIG: u8 = 4;

/// Active learning of Moore machine networks.
#[derive(Parser)]
#[command(name = "mmnlearn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a benchmark system and report query statistics.
    Learn(LearnArgs),
    /// Benchmark utilities.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Write a benchmark network in the text format.
    Export { spec: String, path: PathBuf },
    /// Print sizes and alphabets of a benchmark.
    Show { spec: String },
}

#[derive(Args)]
struct LearnArgs {
    /// Benchmark: binctr:<k>, mqtt, mmnex, cwi, rand:<path|star|compl><k>:<lean|rich>:seed=<n>[:mean=<m>]
    #[arg(long)]
    bench: String,
    #[arg(long, value_parser = parse_with::<Algorithm>)]
    algo: Algorithm,
    /// Component abstraction for ccwl: eq, eqk:<k>, uni
    #[arg(long, default_value = "eq", value_parser = parse_with::<Abstraction>)]
    ca_e: Abstraction,
    /// Reachability bound for ccwl: dinf, d:<n>, dsum, dmax, dmin
    #[arg(long, default_value = "dinf", value_parser = parse_with::<DepthBound>)]
    ca_r: DepthBound,
    /// Random test words per equivalence query.
    #[arg(long, default_value_t = EqTestConfig::default().words_per_eq)]
    eq_words: usize,
    /// Length of each random test word.
    #[arg(long, default_value_t = EqTestConfig::default().word_length)]
    eq_len: usize,
    /// Answer equivalence queries exactly instead of by random testing.
    #[arg(long)]
    exact_eq: bool,
    /// First seed; instance j uses seed + j.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of instances (default 10 for random benchmarks, 1 otherwise).
    #[arg(long)]
    instances: Option<usize>,
    /// Per-instance time budget in seconds.
    #[arg(long, default_value_t = 3600.0)]
    timeout: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "table", value_parser = parse_with::<Format>)]
    format: Format,
    /// Check every learned system against the hidden one.
    #[arg(long)]
    validate: bool,
    /// Output-query memoization: off, exact, prefix
    #[arg(long, default_value = "exact", value_parser = parse_memo)]
    memo: Memo,
    /// Write the system learned by the first instance here.
    #[arg(long)]
    save: Option<PathBuf>,
}

fn parse_with<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn parse_memo(s: &str) -> Result<Memo, String> {
    match s {
        "off" => Ok(Memo::Off),
        "exact" => Ok(Memo::Exact),
        "prefix" => Ok(Memo::Prefix),
        _ => Err(format!("unknown memo mode `{s}` (off, exact, prefix)")),
    }
}

enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

fn config(args: &LearnArgs) -> Result<ExperimentConfig> {
    let bench: BenchmarkSpec = args.bench.parse()?;
    let mut cfg = ExperimentConfig::new(bench, args.algo);
    if args.algo == Algorithm::Ccwl {
        cfg.params = Some(CaParams::new(args.ca_e, args.ca_r));
    }
    cfg.eq = EqTestConfig {
        words_per_eq: args.eq_words,
        word_length: args.eq_len,
        seed: args.seed,
    };
    cfg.exact_eq = args.exact_eq;
    let n = args.instances.unwrap_or(cfg.seeds.len());
    cfg.seeds = (0..n as u64).map(|j| args.seed + j).collect();
    anyhow::ensure!(
        args.timeout.is_finite() && args.timeout >= 0.0,
        "timeout must be nonnegative"
    );
    cfg.timeout = Duration::from_secs_f64(args.timeout);
    cfg.validate = args.validate;
    cfg.memo = args.memo;
    cfg.check()?;
    Ok(cfg)
}

fn learn(args: &LearnArgs) -> Result<Batch, Failure> {
    let cfg = config(args).map_err(Failure::Config)?;
    let batch = run_batch(&cfg).map_err(Failure::Run)?;
    let text = report(&batch, args.format).map_err(Failure::Run)?;
    match &args.out {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Run)?,
        None => print!("{text}"),
    }
    if let Some(p) = &args.save {
        let outcome = run_instance(&cfg, cfg.seeds[0]).map_err(Failure::Run)?;
        if let Some(l) = outcome.learned {
            let text = serialize_learned(&l).map_err(Failure::Run)?;
            std::fs::write(p, text)
                .with_context(|| format!("writing {}", p.display()))
                .map_err(Failure::Run)?;
        }
    }
    Ok(batch)
}

fn bench(cmd: &BenchCommand) -> Result<(), Failure> {
    match cmd {
        BenchCommand::Export { spec, path } => {
            let spec: BenchmarkSpec = spec
                .parse()
                .map_err(|e| Failure::Config(anyhow::Error::new(e)))?;
            let text = mmnlearn_core::format::write_mmn(&spec.build())
                .map_err(|e| Failure::Run(e.into()))?;
            std::fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::Run)
        }
        BenchCommand::Show { spec } => {
            let spec: BenchmarkSpec = spec
                .parse()
                .map_err(|e| Failure::Config(anyhow::Error::new(e)))?;
            println!("{spec}: {}", BenchmarkSpec::summary(&spec.build()));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("MMNLEARN_LOG", "warn"))
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Learn(args) => learn(args).map(Some),
        Command::Bench(cmd) => bench(cmd).map(|_| None),
    };
    match outcome {
        Ok(Some(batch)) => {
            let any = |v: Validation| batch.rows.iter().any(|r| r.validation == v);
            if any(Validation::Incorrect) {
                ExitCode::from(EXIT_VALIDATION)
            } else if any(Validation::Timeout) {
                ExitCode::from(EXIT_TIMEOUT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
