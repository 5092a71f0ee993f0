//! dephasim: qubit pure dephasing under classical stochastic noise.
//!
//! Three subcommands: `simulate` runs a config-file-driven Monte Carlo and
//! writes the selected artifacts, `figure` reproduces a named preset dataset,
//! `validate` runs a named self-check suite. Exit codes: 0 success, 1 failed
//! check or I/O trouble, 2 bad config/usage, 3 numerical failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod figures;
mod runner;
mod svg;
mod validate;

use config::{Format, Overrides, RunConfig};
use runner::RunError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dephasim",
    version,
    about = "Qubit pure dephasing under classical stochastic noise: Monte Carlo curves, spectra, and non-Markovianity reports"
)]
struct Cli {
    /// Line-oriented `section.key = value` config file (simulate only).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; overrides the config file.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads for the Monte Carlo loops; never affects results.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Output directory; overrides the config file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Artifact format; overrides the config file.
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<FormatArg>,

    /// Revival significance in standard errors; overrides the config file.
    #[arg(long, global = true, value_name = "REAL")]
    significance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured simulation and write the selected artifacts.
    Simulate,
    /// Reproduce a named figure dataset (fig1, fig3a, fig3b, fig4a, fig4b, fig4c).
    Figure { name: String },
    /// Run a self-check suite (oracles, spectra, statistics, all).
    Validate { suite: String },
}

fn run(cli: &Cli) -> Result<String, RunError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(RunError::Usage("--threads must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    if let Some(s) = cli.significance {
        if !(s.is_finite() && s > 0.0) {
            return Err(RunError::Usage(format!(
                "--significance must be > 0, got {s}"
            )));
        }
    }
    let over = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format.map(Format::from),
        significance: cli.significance,
    };
    match &cli.command {
        Command::Simulate => {
            let text = match &cli.config {
                Some(path) => Some(fs::read_to_string(path).map_err(|e| {
                    RunError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?),
                None => None,
            };
            let cfg = RunConfig::build(text.as_deref(), &over)?;
            let meta = cfg.meta("simulate");
            runner::simulate(&cfg, &meta)
        }
        Command::Figure { name } => figures::run_figure(
            name,
            cli.seed.unwrap_or(42),
            &cli.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            cli.format.map(Format::from).unwrap_or(Format::Csv),
            cli.significance.unwrap_or(3.0),
        ),
        Command::Validate { suite } => validate::run_suite(suite, cli.seed.unwrap_or(42)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
