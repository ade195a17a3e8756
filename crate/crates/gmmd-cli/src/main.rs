//! Command-line front end: `gmmd test`, `gmmd power`, `gmmd null-sim`.
//!
//! Exit codes: 0 on success, 2 for input problems (bad files, bad flags,
//! malformed configs), 3 for numeric failures.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gmmd_cli::config::parse_experiment_config;
use gmmd_cli::harness::{
    emit_csv, emit_json, parse_kernel_family, run_power_experiment, run_single_test,
    SingleTestOptions, TestMethod,
};
use gmmd_cli::io::{read_grouped_csv, read_spectrum};
use gmmd_cli::CliError;
use gmmd_core::calibration::{simulate_limit_law, LimitLawConfig, Spectrum, Truncation};
use gmmd_core::kernel::{median_heuristic_bandwidth, KernelSpec};

#[derive(Parser)]
#[command(
    name = "gmmd",
    version,
    about = "Kernel-based k-sample testing: one statistic, several calibrations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether the labeled groups in a CSV share one distribution.
    Test(TestArgs),
    /// Run a Monte Carlo power/size experiment described by a config file.
    Power(PowerArgs),
    /// Draw from the large-sample null distribution of the scaled statistic.
    NullSim(NullSimArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV: one row per observation, feature columns then a group label.
    #[arg(long)]
    input: PathBuf,
    /// Kernel family: gaussian-rbf (alias gaussian), laplacian, or
    /// rational-quadratic.
    #[arg(long, default_value = "gaussian-rbf")]
    kernel: String,
    /// Kernel bandwidth parameter.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Set the bandwidth from the median pairwise distance instead of --gamma.
    #[arg(long)]
    median_heuristic: bool,
    /// Calibration method: permutation, spectral, or subsampling.
    #[arg(long, default_value = "permutation")]
    method: String,
    /// Resampling replications for permutation or subsampling calibration.
    #[arg(long = "B", default_value_t = 199)]
    replications: usize,
    /// Monte Carlo draws for spectral calibration.
    #[arg(long, default_value_t = 10_000)]
    draws: usize,
    /// Per-group fraction retained by subsampling calibration.
    #[arg(long, default_value_t = 0.5)]
    subsample_fraction: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    /// Experiment config file (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads; defaults to all available cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct NullSimArgs {
    /// Number of groups; checked against --rho when given.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated group proportions summing to 1, e.g. 0.3,0.3,0.4.
    #[arg(long)]
    rho: String,
    /// Eigenvalue file, one value per line; # starts a comment.
    #[arg(long)]
    spectrum: PathBuf,
    /// Number of draws.
    #[arg(long, default_value_t = 10_000)]
    draws: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write draws here instead of stdout, one per line.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Test(args) => run_test(args),
        Command::Power(args) => run_power(args),
        Command::NullSim(args) => run_null_sim(args),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run_test(args: TestArgs) -> Result<(), CliError> {
    let family = parse_kernel_family(&args.kernel)?;
    let method: TestMethod = args.method.parse()?;
    let table = read_grouped_csv(open(&args.input)?)?;
    let gamma = if args.median_heuristic {
        let pooled = table.data.pooled_points();
        median_heuristic_bandwidth(&pooled)?
    } else {
        args.gamma
    };
    let kernel = KernelSpec::new(family, gamma)?;
    let opts = SingleTestOptions {
        method,
        replications: args.replications,
        draws: args.draws,
        fraction: args.subsample_fraction,
        seed: args.seed,
    };
    let report = run_single_test(&table, &kernel, &opts)?;
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn run_power(args: PowerArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", args.config.display())))?;
    let config = parse_experiment_config(&text)?;
    let curve = match args.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::input(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_power_experiment(&config))?
        }
        None => run_power_experiment(&config)?,
    };
    let rendered = match args.format.as_str() {
        "csv" => emit_csv(&curve)?,
        "json" => emit_json(&curve)?,
        other => {
            return Err(CliError::input(format!(
                "unknown format {other:?}; expected csv or json"
            )));
        }
    };
    write_output(args.out.as_deref(), &rendered)
}

fn run_null_sim(args: NullSimArgs) -> Result<(), CliError> {
    let mut rho = Vec::new();
    for part in args.rho.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let p: f64 = part
            .parse()
            .map_err(|_| CliError::input(format!("invalid proportion {part:?} in --rho")))?;
        rho.push(p);
    }
    if let Some(k) = args.k {
        if k != rho.len() {
            return Err(CliError::input(format!(
                "--k is {k} but --rho lists {} proportions",
                rho.len()
            )));
        }
    }
    let raw = read_spectrum(open(&args.spectrum)?)?;
    let source_size = raw.len();
    // Keep the user's eigenvalues as given; only drop nonpositive ones.
    let spectrum = Spectrum::new(raw, Truncation::Threshold(0.0), source_size)?;
    let config = LimitLawConfig::new(rho, spectrum, args.draws, args.seed)?;
    let draws = simulate_limit_law(&config);
    let mut text = String::with_capacity(draws.len() * 20);
    for d in draws {
        text.push_str(&format!("{d}\n"));
    }
    write_output(args.out.as_deref(), &text)
}
