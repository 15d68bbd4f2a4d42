//! Command-line front end: argument and config-file parsing, dispatch to the
//! library, and canonical JSON/CSV/text output.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use thiserror::Error;

pub use commands::{csv_layout, dispatch, oracle_tolerance};
pub use config::{parse_config, Command, FileConfig, Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidConfig(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] wssus::Error),
    #[error("out: cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::InvalidConfig(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Rendered document for a validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let doc = dispatch(cfg)?;
    output::render(&doc, &csv_layout(cfg.command), cfg.format)
        .map_err(|e| CliError::Numerical(wssus::Error::InvalidInput(format!("csv: {e}"))))
}

/// Full program: parse, run, write. Returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let result = parse_config(args).and_then(|cfg| {
        let text = execute(&cfg)?;
        match &cfg.out {
            Some(path) => fs::write(path, text).map_err(|source| CliError::Output {
                path: path.clone(),
                source,
            }),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Output {
                    path: PathBuf::from("<stdout>"),
                    source,
                }),
        }
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
