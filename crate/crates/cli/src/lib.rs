//! Command-line driver for `diracwalk-core`.
//!
//! Subcommands: `sqw` (lattice walks), `density` (limit-law tables),
//! `moments` (momentum-space, velocity-space and finite-time moment
//! reports), `figures` (figure data) and `acceptance` (the numeric checks).
//!
//! Exit codes: 0 success, 1 I/O failure or failed acceptance check, 2 usage or domain error,
//! 3 non-convergence under `--strict`.

// `!(x > 0.0)` also rejects NaN; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod numparse;
pub mod output;

use config::Canonical;
use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] numparse::ParseError),
    #[error(transparent)]
    Domain(#[from] diracwalk_core::Error),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("failed checks: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Domain(diracwalk_core::Error::Convergence(_)) | CliError::NotConverged(_) => 3,
            CliError::Domain(_) => 2,
            CliError::Io(_) | CliError::CheckFailed(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "diracwalk", version, about = "Quantum walks, free Dirac dynamics and their pseudovelocity limit laws")]
pub struct Cli {
    /// Key-value config file; command-line flags win on conflict.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (directory for `figures`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "DIRACWALK_THREADS")]
    pub threads: Option<usize>,
    /// Exit with code 3 when any quadrature fails to converge.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Print the canonical config for this run and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a simple quantum walk and write its distribution.
    Sqw(commands::sqw::SqwArgs),
    /// Tabulate a limit density on a grid.
    Density(commands::density::DensityArgs),
    /// Compare asymptotic, law and finite-time moments of the Dirac model.
    Moments(commands::moments::MomentsArgs),
    /// Write the data behind a figure.
    Figures(commands::figures::FiguresArgs),
    /// Run the acceptance checks and print one line per criterion.
    Acceptance(acceptance::AcceptanceArgs),
}

pub const COMMANDS: &[&str] = &["sqw", "density", "moments", "figures", "acceptance"];

/// Settings shared by every subcommand.
pub struct Global {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict: bool,
    pub canonical: Canonical,
}

#[derive(Args, Debug, Clone)]
pub struct Units {
    /// Particle mass m.
    #[arg(long, default_value = "1")]
    pub mass: String,
    /// Speed of light c.
    #[arg(long, default_value = "1")]
    pub c: String,
    /// Reduced Planck constant.
    #[arg(long, default_value = "1")]
    pub hbar: String,
}

impl Units {
    pub fn params(&self) -> Result<diracwalk_core::PhysParams, CliError> {
        let m = numparse::parse_real(&self.mass)?;
        let c = numparse::parse_real(&self.c)?;
        let h = numparse::parse_real(&self.hbar)?;
        Ok(diracwalk_core::PhysParams::new(m, c, h)?)
    }
}

/// Run with the given argv; returns the exit code. Messages go to stderr.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    match run_inner(argv) {
        Ok(()) => 0,
        Err(Exit::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(Exit::Cli(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

enum Exit {
    Clap(clap::Error),
    Cli(CliError),
}

impl From<CliError> for Exit {
    fn from(e: CliError) -> Self {
        Exit::Cli(e)
    }
}

fn run_inner(argv: Vec<String>) -> Result<(), Exit> {
    let argv = config::merge_config(argv, COMMANDS)?;
    let mut cmd = Cli::command();
    let matches = cmd.try_get_matches_from_mut(&argv).map_err(Exit::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(Exit::Clap)?;
    let canonical = Canonical::from_matches(&cmd, &matches);
    if cli.dump_config {
        output::emit(&canonical.to_config_text(), cli.out.as_deref())?;
        return Ok(());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()).into());
        }
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let g = Global { out: cli.out, format: cli.format, strict: cli.strict, canonical };
    match cli.command {
        Command::Sqw(a) => commands::sqw::run(&a, &g)?,
        Command::Density(a) => commands::density::run(&a, &g)?,
        Command::Moments(a) => commands::moments::run(&a, &g)?,
        Command::Figures(a) => commands::figures::run(&a, &g)?,
        Command::Acceptance(a) => acceptance::run(&a, &g)?,
    }
    Ok(())
}
