//! `mimo-bands` — command-line front end for the band-comparison studies.
//!
//! Exit codes: 0 success, 1 runtime error, 2 config error, 64 usage error.
//! Every error is a single `error: ...` line on standard error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use mimo_bands_core::propagation::MmWaveScenario;
use mimo_bands_experiments::config::ExperimentConfig;
use mimo_bands_experiments::csv_io::render_csv;
use mimo_bands_experiments::study::run_study;
use mimo_bands_experiments::Error;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "mimo-bands",
    version,
    about = "Seeded Monte-Carlo studies of massive-MIMO links at sub-6 GHz and mm-wave carriers",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study described by a config file and write its curves as CSV.
    Run(RunArgs),
    /// Parse and validate a config file without running anything.
    ValidateConfig(ValidateArgs),
    /// Print the mm-wave attenuation scenario registry.
    ListScenarios {
        /// Carrier frequency the registry is instantiated at, in GHz.
        #[arg(long, default_value_t = 73.0)]
        carrier_ghz: f64,
    },
    /// Print the version.
    Version,
}

#[derive(Args)]
struct RunArgs {
    /// Study configuration file (flat key = value lines).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Output CSV path; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Override the config's master random seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Override one config key, e.g. --set n_trials=50 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker thread count; 0 or absent lets the runtime decide.
    #[arg(long, env = "MIMO_BANDS_WORKERS", value_name = "N")]
    workers: Option<usize>,
    /// Suppress the summary line on standard error.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Study configuration file to check.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override one config key before validating (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not errors.
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match cli.command {
        Command::Run(args) => run(args),
        Command::ValidateConfig(args) => validate(args),
        Command::ListScenarios { carrier_ghz } => list_scenarios(carrier_ghz),
        Command::Version => {
            println!("mimo-bands {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    overrides: &[String],
) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_file(path)?;
    for pair in overrides {
        cfg.apply_override(pair)?;
    }
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> ExitCode {
    let cfg = match load_config(&args.config, args.seed, &args.overrides) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let execute = || run_study(&cfg);
    let points = match args.workers {
        Some(n) if n > 0 => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: could not start {n} workers: {e}");
                    return ExitCode::from(EXIT_RUNTIME);
                }
            };
            pool.install(execute)
        }
        _ => execute(),
    };
    let points = match points {
        Ok(points) => points,
        Err(e) => return fail(&e),
    };
    // The effective config (file + overrides + seed) rides along as comments.
    let comments: Vec<String> = cfg
        .to_key_value_lines()
        .into_iter()
        .map(|line| format!("config: {line}"))
        .collect();
    let rendered = render_csv(&points, &comments);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                return fail(&Error::io(path, e));
            }
            if !args.quiet {
                eprintln!("wrote {} curve points to {}", points.len(), path.display());
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::SUCCESS
}

fn validate(args: ValidateArgs) -> ExitCode {
    match load_config(&args.config, None, &args.overrides) {
        Ok(_) => {
            println!("ok");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn list_scenarios(carrier_ghz: f64) -> ExitCode {
    for s in MmWaveScenario::registry(carrier_ghz) {
        let mut line = format!(
            "{} n={} sigma={} b={}",
            s.name, s.path_loss_exponent, s.shadow_sigma_db, s.freq_scaling_b
        );
        if let Some(f0) = s.ref_freq_f0_ghz {
            line.push_str(&format!(" f0={f0}"));
        }
        println!("{line}");
    }
    ExitCode::SUCCESS
}

/// Prints the single-line error and picks the exit code by error class:
/// malformed or invalid configuration is distinguishable from runtime
/// failures so scripts can react differently.
fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        Error::Config { .. } | Error::Invalid { .. } => EXIT_CONFIG,
        // Parameter-validation failures surfacing from the channel library
        // are config problems too; everything else is a runtime failure.
        Error::Core(core_err) => match core_err {
            mimo_bands_core::Error::InvalidConfig { .. } => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        },
        Error::Io { .. } | Error::GridPoint { .. } => EXIT_RUNTIME,
    };
    ExitCode::from(code)
}
