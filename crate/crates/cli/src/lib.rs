//! Command line front end for `focp-core`.
//!
//! Every command reads one TOML configuration, writes CSV tables (and
//! optionally SVG plots) into the output directory together with the fully
//! resolved configuration, and prints a one-line summary.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::SensitivityMode;
use crate::config::{parse_strategy, ConfigFile, SegmentEntry};
use crate::output::OutDir;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(#[from] focp_core::Error),
    #[error("sweep did not converge after {iterations} iterations (last relative change {change:e}); outputs were written")]
    NonConvergence { iterations: usize, change: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NonConvergence { .. } => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "focp", version, about = "Fractional-order cholera model: simulation, sensitivity, optimal control and cost-effectiveness")]
pub struct Args {
    /// TOML configuration file.
    #[arg(short, long, global = true, default_value = "configs/baseline.toml")]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    /// Fill rates without a reference value from the built-in baseline.
    #[arg(long, global = true)]
    pub use_derived_defaults: bool,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Table,
    VsAlpha,
    VsControl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    DtcDav,
    DavDtc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the state system under the constant controls of the config.
    Simulate {
        /// Constant fractional order (overrides `[order]`).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Reproduction numbers over the `r0.alpha` range.
    R0,
    /// Normalized sensitivity indices of R01 and R02.
    Sensitivity {
        #[arg(long, value_enum, default_value = "table")]
        mode: Mode,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Solve the optimal control problem for one strategy.
    Optimize {
        #[arg(long, default_value = "C")]
        strategy: String,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Solve or replay strategies and rank them by ACER and ICER.
    Costeff {
        #[arg(long, value_enum)]
        orientation: Option<OrientationArg>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Optimal control with a fractional-then-integer order schedule.
    Fractint {
        #[arg(long)]
        alpha0: Option<f64>,
        #[arg(long = "t-prime")]
        t_prime: Option<f64>,
        /// Scan switch times from t0 to tf in steps of `fractint.scan_step`.
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value = "C")]
        strategy: String,
    },
}

fn set_alpha(file: &mut ConfigFile, alpha: Option<f64>) {
    if let Some(a) = alpha {
        file.order.alpha = a;
        file.order.segments = Vec::<SegmentEntry>::new();
    }
}

pub fn run(args: Args) -> Result<(), CliError> {
    let mut file = ConfigFile::load(&args.config)?;
    if args.use_derived_defaults {
        file.fill_derived_defaults();
    }
    if let Some(dir) = &args.out {
        file.output.dir = dir.clone();
    }
    if args.plot {
        file.output.plot = true;
    }
    match &args.command {
        Command::Simulate { alpha } | Command::Sensitivity { alpha, .. } | Command::Optimize { alpha, .. } => {
            set_alpha(&mut file, *alpha)
        }
        Command::Costeff { orientation, alpha } => {
            set_alpha(&mut file, *alpha);
            if let Some(o) = orientation {
                file.costeff.orientation = match o {
                    OrientationArg::DtcDav => "dtc-dav",
                    OrientationArg::DavDtc => "dav-dtc",
                }
                .into();
            }
        }
        Command::Fractint { alpha0, t_prime, .. } => {
            if let Some(a) = alpha0 {
                file.fractint.alpha0 = *a;
            }
            if let Some(t) = t_prime {
                file.fractint.t_prime = *t;
            }
        }
        Command::R0 => {}
    }

    let cfg = file.resolve()?;
    let out = OutDir::create(&cfg.output.dir)?;
    out.text(
        "resolved_config.toml",
        &format!("# Fully resolved configuration of this run; usable as --config.\n{}", file.to_toml()),
    )?;

    match args.command {
        Command::Simulate { .. } => commands::simulate(&cfg, &out),
        Command::R0 => commands::r0(&cfg, &out),
        Command::Sensitivity { mode, .. } => {
            let mode = match mode {
                Mode::Table => SensitivityMode::Table,
                Mode::VsAlpha => SensitivityMode::VsAlpha,
                Mode::VsControl => SensitivityMode::VsControl,
            };
            commands::sensitivity(&cfg, &out, mode)
        }
        Command::Optimize { strategy, .. } => commands::optimize(&cfg, &out, parse_strategy(&strategy)?),
        Command::Costeff { .. } => commands::costeff(&cfg, &out),
        Command::Fractint { scan, strategy, .. } => commands::fractint(&cfg, &out, parse_strategy(&strategy)?, scan),
    }
}
