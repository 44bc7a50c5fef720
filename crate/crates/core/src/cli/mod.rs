//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 integration
//! halted (partial output kept), 3 a tolerance check failed.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ConfigError, RunConfig};

/// Reserved for future stochastic features; nothing reads it yet.
pub const SEED_ENV: &str = "CURVED_LARMOR_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "curved-larmor",
    version,
    about = "Charged-particle motion in a uniform magnetic field on H³ and S³"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// key = value configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one configuration key (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory, created if missing
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Format of trajectory and sweep tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and export it with a manifest
    Simulate,
    /// Compare an integrated trajectory with the closed forms
    Compare,
    /// Run a one- or two-parameter grid of trajectories
    Sweep,
    /// Report the axial regime and orbit class of the initial state
    Classify,
    /// Check the field equation for the vector potential on a radial grid
    MaxwellCheck,
    /// Re-check the exported trajectory in --out against its manifest
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Halted,
    ToleranceFailure,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Halted => 2,
            Outcome::ToleranceFailure => 3,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Offending key and message.
    Config(String, String),
    Usage(String),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.key, e.message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(key, msg) => write!(f, "config key '{key}': {msg}"),
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    if cli.command == Command::Verify {
        return commands::verify(&cli.out);
    }
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let cfg = RunConfig::load(&text, &cli.set)?;
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &cli.out, cli.format),
        Command::Compare => commands::compare(&cfg, &cli.out),
        Command::Sweep => commands::sweep(&cfg, &cli.out, cli.format, cli.jobs),
        Command::Classify => commands::classify(&cfg, &cli.out),
        Command::MaxwellCheck => commands::maxwell_check(&cfg, &cli.out),
        Command::Verify => unreachable!("handled above"),
    }
}
