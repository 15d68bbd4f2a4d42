use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use wssus::{Quad, Scattering};

use crate::CliError;

pub const DEFAULT_SIGMA2: f64 = 0.1;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "wssus",
    version,
    about = "Optimal pulses and multiplexing schemes for WSSUS channels on the finite Weyl-Heisenberg group"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Closed-form optimal precoder, equalizer and zero-crosstalk schemes.
    Solve,
    /// Channel regime and extremal-family membership.
    Classify,
    /// Closed form against a sampled search over the Bloch sphere.
    Oracle {
        /// Also evaluate the three coordinate axes.
        #[arg(long)]
        include_axes: bool,
    },
    /// Monte Carlo estimate of gain, interference and SINR.
    Simulate,
    /// Worst-case family over an evenly spaced p0 grid.
    Sweep {
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Numerical search for general L.
    General {
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Scattering quad p0,p1,p2,p3.
    #[arg(
        long,
        global = true,
        value_name = "a,b,c,d",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub p: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p2: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p3: Option<f64>,
    /// Signal dimension.
    #[arg(long = "L", global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma2: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON file with keys p, L, sigma2, trials, samples, seed, scattering.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<Vec<f64>>,
    #[serde(rename = "L")]
    pub dim: Option<usize>,
    pub sigma2: Option<f64>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub scattering: Option<Grid>,
}

/// Scattering weights, either as rows or flattened row-major.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::InvalidConfig(vec![format!("config: cannot read {}: {e}", path.display())])
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::InvalidConfig(vec![format!("config: {}: {e}", path.display())]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Classify,
    Oracle { include_axes: bool },
    Simulate,
    Sweep { points: usize },
    General { restarts: usize },
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Classify => "classify",
            Command::Oracle { .. } => "oracle",
            Command::Simulate => "simulate",
            Command::Sweep { .. } => "sweep",
            Command::General { .. } => "general",
        }
    }

    fn needs_quad(self) -> bool {
        matches!(
            self,
            Command::Solve | Command::Classify | Command::Oracle { .. } | Command::Simulate
        )
    }
}

/// Validated run description. `quad` is set whenever a quad was supplied;
/// `scattering` is always set for `general`.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub quad: Option<Quad>,
    pub scattering: Option<Scattering>,
    pub dim: usize,
    pub sigma2: f64,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Parses command-line arguments (program name first), loading `--config`
/// when given. Flags override file values.
pub fn parse_config<I, S>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let file = match &cli.opts.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    resolve(cli, file)
}

/// Merges flags over file values and validates, reporting every violation.
pub fn resolve(cli: Cli, file: FileConfig) -> Result<RunConfig, CliError> {
    let opts = cli.opts;
    let command = match cli.command {
        CommandArgs::Solve => Command::Solve,
        CommandArgs::Classify => Command::Classify,
        CommandArgs::Oracle { include_axes } => Command::Oracle { include_axes },
        CommandArgs::Simulate => Command::Simulate,
        CommandArgs::Sweep { points } => Command::Sweep { points },
        CommandArgs::General { restarts } => Command::General { restarts },
    };
    let mut errors = Vec::new();

    let weights = merge_quad(&opts, file.p.as_deref(), &mut errors);
    let quad = weights.and_then(|w| match Quad::new(w) {
        Ok(q) => Some(q),
        Err(e) => {
            errors.push(format!("p: {e}"));
            None
        }
    });

    let grid = file.scattering.map(|g| match g {
        Grid::Rows(rows) => (
            Some(rows.len()),
            rows.iter().all(|r| r.len() == rows.len()),
            rows.concat(),
        ),
        Grid::Flat(flat) => (None, true, flat),
    });
    let inferred = grid.as_ref().and_then(|(rows, _, flat)| {
        rows.or_else(|| {
            let side = (flat.len() as f64).sqrt().round() as usize;
            (side * side == flat.len()).then_some(side)
        })
    });
    let dim = opts.dim.or(file.dim).or(inferred).unwrap_or(2);
    if dim == 0 {
        errors.push("L: must be at least 1".into());
    }
    if quad.is_some() && dim != 2 {
        errors.push(format!("L: a quad p0..p3 describes L = 2, not L = {dim}"));
    }

    let mut scattering = None;
    if let Some((_, square, flat)) = grid {
        if !square || flat.len() != dim * dim {
            errors.push(format!(
                "scattering: expected an {dim} x {dim} grid ({} weights), got {}",
                dim * dim,
                flat.len()
            ));
        } else if let Some(bad) = flat.iter().find(|w| !w.is_finite() || **w < 0.0) {
            errors.push(format!(
                "scattering: weights must be finite and nonnegative (found {bad})"
            ));
        } else {
            match Scattering::new(dim, flat) {
                Ok(c) => scattering = Some(c),
                Err(e) => errors.push(format!("scattering: {e}")),
            }
        }
    }

    if command.needs_quad() && quad.is_none() && !errors.iter().any(|e| e.starts_with("p:")) {
        errors.push(format!(
            "p: a quad (--p or --p0..--p3) is required for {}",
            command.name()
        ));
    }
    if let Command::General { restarts } = command {
        if scattering.is_none()
            && quad.is_none()
            && !errors.iter().any(|e| e.starts_with("scattering:"))
        {
            errors.push(format!(
                "scattering: an L x L grid is required for general at L = {dim}"
            ));
        }
        if restarts == 0 {
            errors.push("restarts: must be at least 1".into());
        }
    }
    let scattering = scattering.or_else(|| {
        matches!(command, Command::General { .. })
            .then(|| quad.map(|q| q.to_scattering()))
            .flatten()
    });

    let sigma2 = opts.sigma2.or(file.sigma2).unwrap_or(DEFAULT_SIGMA2);
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        errors.push(format!(
            "sigma2: must be finite and nonnegative (got {sigma2})"
        ));
    }
    let trials = opts.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    if matches!(command, Command::Simulate | Command::Sweep { .. }) && trials < 2 {
        errors.push(format!("trials: must be at least 2 (got {trials})"));
    }
    let samples = opts.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if matches!(command, Command::Oracle { .. } | Command::General { .. }) && samples == 0 {
        errors.push("samples: must be at least 1".into());
    }
    if let Command::Sweep { points } = command {
        if points < 2 {
            errors.push(format!("points: must be at least 2 (got {points})"));
        }
    }

    if !errors.is_empty() {
        return Err(CliError::InvalidConfig(errors));
    }
    Ok(RunConfig {
        command,
        quad,
        scattering,
        dim,
        sigma2,
        trials,
        samples,
        seed: opts.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        format: opts.format.unwrap_or_default(),
        out: opts.out,
    })
}

/// File `p`, then `--p`, then the individual `--pK` flags.
fn merge_quad(
    opts: &GlobalOpts,
    file: Option<&[f64]>,
    errors: &mut Vec<String>,
) -> Option<[f64; 4]> {
    let mut base: Option<[f64; 4]> = None;
    for (source, values) in [("config p", file), ("--p", opts.p.as_deref())] {
        if let Some(values) = values {
            match <[f64; 4]>::try_from(values) {
                Ok(w) => base = Some(w),
                Err(_) => errors.push(format!("p: {source} needs 4 weights, got {}", values.len())),
            }
        }
    }
    let singles = [opts.p0, opts.p1, opts.p2, opts.p3];
    if singles.iter().all(Option::is_none) {
        return base;
    }
    match base {
        Some(mut w) => {
            for (slot, value) in w.iter_mut().zip(singles) {
                if let Some(v) = value {
                    *slot = v;
                }
            }
            Some(w)
        }
        None => {
            let missing: Vec<String> = singles
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_none())
                .map(|(k, _)| format!("--p{k}"))
                .collect();
            if missing.is_empty() {
                Some(singles.map(|v| v.expect("checked above")))
            } else {
                errors.push(format!(
                    "p: missing {} (or give --p a,b,c,d)",
                    missing.join(", ")
                ));
                None
            }
        }
    }
}
