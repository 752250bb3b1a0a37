//! Command-line driver: configuration, orchestration and output files.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

pub use commands::Command;
use config::{Overrides, RunConfig};
use output::{RunStamp, Sink};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("output: {0}")]
    Io(String),
    #[error(transparent)]
    Numeric(#[from] fracdrift::Error),
}

impl CliError {
    fn usage(e: fracdrift::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Everything the binary needs after argument parsing.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub overrides: Overrides,
    pub threads: Option<usize>,
}

/// Outcome of a completed run.
pub struct RunSummary {
    pub lines: Vec<String>,
    pub written: Vec<PathBuf>,
    pub exit_code: i32,
}

pub fn execute(inv: &Invocation) -> Result<RunSummary, CliError> {
    let raw = match &inv.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = raw.resolve(&inv.overrides)?;
    let threads = match inv.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let sink = Sink::new(&cfg.output.directory, RunStamp::new(inv.command.name(), &cfg))?;
    let mut ctx = commands::Context { cfg: &cfg, threads, sink, reports: Vec::new() };
    commands::run(inv.command, &mut ctx)?;
    let all_passed = ctx.reports.iter().all(|r| r.passed);
    Ok(RunSummary {
        lines: ctx.reports.iter().map(|r| r.summary()).collect(),
        written: ctx.sink.written,
        exit_code: if inv.command.strict() && !all_passed { EXIT_CHECK_FAILED } else { EXIT_OK },
    })
}
