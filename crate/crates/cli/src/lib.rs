//! Command-line front end for `dichospec`: reads a TOML run configuration,
//! applies flag overrides, runs one procedure and writes CSV, JSON or a
//! text table, plus optional plot series.

pub mod commands;
pub mod config;
pub mod output;
pub mod tables;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::commands::{execute, Artifact};
use crate::config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    /// Carries the library message, which names the violated condition.
    #[error("{0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

/// Sorts a library error into malformed input or a violated precondition.
pub fn lib_error(e: impl Into<dichospec::Error>) -> CliError {
    let e = e.into();
    if e.is_precondition() {
        CliError::Precondition(e.to_string())
    } else {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Lyapunov intervals from running averages over [T1, T2]
    Lyap,
    /// Dichotomy intervals from Steklov averages over [t0, T - H]
    Ed,
    /// Nonuniform dichotomy intervals with a long window H over [T1, T2]
    Ned,
    /// Nonuniform bias per component
    Bias,
    /// Full pipeline: bias, Lyapunov, ED and NED intervals, containment check
    Report,
    /// Weak integral separation certificates and membership tests
    CheckWis,
    /// Growth bound estimates
    Growth,
    /// The four reference tables
    Tables,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Lyap => "lyap",
            Command::Ed => "ed",
            Command::Ned => "ned",
            Command::Bias => "bias",
            Command::Report => "report",
            Command::CheckWis => "check-wis",
            Command::Growth => "growth",
            Command::Tables => "tables",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dichospec",
    version,
    about = "Finite-time spectra of diagonal nonautonomous linear systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for (t, value) series files
    #[arg(long, global = true)]
    pub plot_data: Option<PathBuf>,

    /// Builtin system name
    #[arg(long, global = true)]
    pub system: Option<String>,
    /// Builtin parameter override, KEY=VALUE (repeatable)
    #[arg(long = "param", global = true, value_parser = parse_param)]
    pub params: Vec<(String, f64)>,

    /// Steklov window length
    #[arg(long = "H", global = true)]
    pub h: Option<f64>,
    /// Window start; `t0` for `ed`
    #[arg(long = "T1", global = true)]
    pub t1: Option<f64>,
    /// Window end; `T` for `ed`, the pair grid horizon for `check-wis` and `growth`
    #[arg(long = "T2", global = true)]
    pub t2: Option<f64>,
    /// Start of the `ed` range
    #[arg(long = "t0", global = true)]
    pub t0: Option<f64>,
    /// End of the `ed` range, or the pair grid horizon
    #[arg(long = "T", global = true)]
    pub t: Option<f64>,
    /// Sampling step of the time grid (at most pi/4)
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    /// Bias threshold for the uniform/nonuniform decision
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl Cli {
    /// Folds the flag overrides into `config` for the selected command.
    pub fn apply(&self, config: &mut RunConfig) -> Result<(), CliError> {
        let cmd = self.command;
        let reject = |flag: &str, given: bool| {
            if given {
                Err(CliError::Config(format!(
                    "{flag} does not apply to `{}`",
                    cmd.name()
                )))
            } else {
                Ok(())
            }
        };
        if self.system.is_some() {
            if config.system.coefficients.is_some() {
                return Err(CliError::Config(
                    "--system conflicts with system.coefficients in the config file".into(),
                ));
            }
            config.system.builtin = self.system.clone();
        }
        for (k, v) in &self.params {
            config.system.params.insert(k.clone(), *v);
        }
        if let Some(f) = self.format {
            config.output.format = Some(f);
        }
        if let Some(p) = &self.out {
            config.output.path = Some(p.display().to_string());
        }
        if let Some(p) = &self.plot_data {
            config.output.plot_data = Some(p.display().to_string());
        }

        let end = self.t2.or(self.t);
        let start = self.t1.or(self.t0);
        match cmd {
            Command::Lyap => {
                reject("--H", self.h.is_some())?;
                reject("--epsilon", self.epsilon.is_some())?;
                let l = &mut config.lyap;
                set(&mut l.t1, start);
                set(&mut l.t2, end);
                set(&mut l.grid_step, self.grid_step);
            }
            Command::Ed => {
                reject("--epsilon", self.epsilon.is_some())?;
                let e = &mut config.ed;
                set(&mut e.h, self.h);
                set(&mut e.t0, start);
                set(&mut e.t, end);
                set(&mut e.grid_step, self.grid_step);
            }
            Command::Ned => {
                reject("--epsilon", self.epsilon.is_some())?;
                let n = &mut config.ned;
                set(&mut n.h, self.h);
                set(&mut n.t1, start);
                set(&mut n.t2, end);
                set(&mut n.grid_step, self.grid_step);
            }
            Command::Bias => {
                let b = &mut config.bias;
                set(&mut b.h, self.h);
                set(&mut b.t1, start);
                set(&mut b.t2, end);
                set(&mut b.grid_step, self.grid_step);
                set(&mut b.epsilon, self.epsilon);
            }
            Command::Report | Command::Tables => {
                for (flag, given) in [
                    ("--H", self.h.is_some()),
                    ("--T1/--t0", start.is_some()),
                    ("--T2/--T", end.is_some()),
                    ("--grid-step", self.grid_step.is_some()),
                ] {
                    reject(flag, given)?;
                }
                set(&mut config.bias.epsilon, self.epsilon);
            }
            Command::CheckWis | Command::Growth => {
                for (flag, given) in [
                    ("--H", self.h.is_some()),
                    ("--T1/--t0", start.is_some()),
                    ("--grid-step", self.grid_step.is_some()),
                    ("--epsilon", self.epsilon.is_some()),
                ] {
                    reject(flag, given)?;
                }
                if cmd == Command::CheckWis {
                    set(&mut config.wis.t, end);
                } else {
                    set(&mut config.growth.t, end);
                }
            }
        }
        Ok(())
    }
}

/// Runs the parsed command line end to end.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.apply(&mut config)?;
    let plot_dir = config.output.plot_data.clone().map(PathBuf::from);
    if plot_dir.is_some()
        && matches!(
            cli.command,
            Command::CheckWis | Command::Growth | Command::Tables
        )
    {
        return Err(CliError::Config(format!(
            "--plot-data is not available for `{}`",
            cli.command.name()
        )));
    }
    let artifact = execute(cli.command, &config, plot_dir.is_some())?;
    let format = config.output.format.unwrap_or(Format::Table);
    let out = config.output.path.as_deref().map(Path::new);
    emit(&artifact, format, out, plot_dir.as_deref())
}

pub fn render(artifact: &Artifact, format: Format) -> String {
    match format {
        Format::Csv => artifact.csv.clone(),
        Format::Json => output::to_json(&artifact.json),
        Format::Table => artifact.table.clone(),
    }
}

pub fn emit(
    artifact: &Artifact,
    format: Format,
    out: Option<&Path>,
    plot_dir: Option<&Path>,
) -> Result<(), CliError> {
    let text = render(artifact, format);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if let Some(dir) = plot_dir {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
        for (stem, points) in &artifact.series {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|&(t, v)| vec![output::exact(t), output::exact(v)])
                .collect();
            let path = dir.join(format!("{stem}.csv"));
            fs::write(&path, output::to_csv(&["t", "value"], &rows))
                .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(())
}
