//! Command-line front end: parameter sweeps, threshold optimization and
//! Monte-Carlo validation, emitted as CSV or JSON.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod sweep;
pub mod table;
pub mod validate;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{cmd_coverage, cmd_ee, cmd_rate, cmd_simulate, CoverageArgs, EeArgs, Method, RateArgs};
use config::load_config;
use sweep::SweepSpec;
use table::Table;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration: exit code 2.
    #[error("{0}")]
    Input(String),
    /// A computation or a validation check failed: exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn input<E: std::fmt::Display>(e: E) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn failure<E: std::fmt::Display>(e: E) -> Self {
        CliError::Failure(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "cellwait",
    version,
    about = "Coverage, rate and energy efficiency of delayed access in small-cell networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat JSON network configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Mc {
    /// Monte-Carlo trials per point.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// RNG seed; falls back to CELLWAIT_SEED, then 42.
    #[arg(long, env = "CELLWAIT_SEED")]
    pub seed: Option<u64>,
}

impl Mc {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage probability over an SIR target or threshold-distance sweep.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: Mc,
        #[arg(long, default_value = "gamma_db:-10:20:31")]
        sweep: SweepSpec,
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
        /// SIR target in dB for r_th sweeps.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma_db: f64,
        /// Add coverage-optimal threshold columns (gamma_db sweeps).
        #[arg(long)]
        optimal_threshold: bool,
    },
    /// Ergodic rate over a threshold sweep for several delay budgets.
    Rate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: Mc,
        #[arg(long, default_value = "r_th:0:30:61")]
        sweep: SweepSpec,
        /// Comma-separated delay budgets in seconds.
        #[arg(long, default_value = "0,5,10,20", value_delimiter = ',')]
        w_values: Vec<f64>,
        /// Bisection resolution in meters.
        #[arg(long, default_value_t = cellwait::optimize::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Upper bracket for the bisection; derived per w when absent.
        #[arg(long)]
        r_upper: Option<f64>,
        #[arg(long, value_enum, default_value = "quad")]
        method: Method,
    },
    /// Normalized energy efficiency over cell availability per sleep-to-idle ratio.
    Ee {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "beta_w:0.1:0.99:90")]
        sweep: SweepSpec,
        /// Comma-separated p_S / p_I ratios.
        #[arg(long, default_value = "0.01,1,2,4,8", value_delimiter = ',')]
        theta_ratios: Vec<f64>,
        #[arg(long, default_value_t = cellwait::optimize::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Fixed threshold distance; rate-optimal per point when absent.
        #[arg(long)]
        r_th: Option<f64>,
    },
    /// Analytic and Monte-Carlo self-consistency report (JSON).
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, env = "CELLWAIT_SEED")]
        seed: Option<u64>,
    },
    /// Per-trial Monte-Carlo records.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: Mc,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Input(format!("cannot create {}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(table: &Table, common: &Common) -> Result<(), CliError> {
    let mut w = sink(&common.out)?;
    match common.format {
        Format::Csv => table.write_csv(&mut w).map_err(CliError::failure)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table.to_json()).map_err(CliError::failure)?;
            writeln!(w).map_err(CliError::failure)?;
        }
    }
    Ok(())
}

fn pool(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Input("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(format!("cannot start worker pool: {e}")))?;
    }
    Ok(())
}

fn trials(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    Ok(n)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Coverage {
            common,
            mc,
            sweep,
            method,
            gamma_db,
            optimal_threshold,
        } => {
            pool(common.workers)?;
            let cfg = load_config(&common.config).map_err(CliError::input)?;
            let args = CoverageArgs {
                sweep,
                method,
                n_trials: trials(mc.trials)?,
                seed: mc.seed(),
                gamma_db,
                optimal_threshold,
            };
            emit(&cmd_coverage(&cfg, &args)?, &common)
        }
        Command::Rate {
            common,
            mc,
            sweep,
            w_values,
            epsilon,
            r_upper,
            method,
        } => {
            pool(common.workers)?;
            let cfg = load_config(&common.config).map_err(CliError::input)?;
            let args = RateArgs {
                sweep,
                w_values,
                epsilon,
                r_upper,
                method,
                n_trials: trials(mc.trials)?,
                seed: mc.seed(),
            };
            emit(&cmd_rate(&cfg, &args)?, &common)
        }
        Command::Ee {
            common,
            sweep,
            theta_ratios,
            epsilon,
            r_th,
        } => {
            pool(common.workers)?;
            let cfg = load_config(&common.config).map_err(CliError::input)?;
            let args = EeArgs {
                sweep,
                theta_ratios,
                epsilon,
                r_th,
            };
            emit(&cmd_ee(&cfg, &args)?, &common)
        }
        Command::Validate {
            config,
            out,
            workers,
            trials: n,
            seed,
        } => {
            pool(workers)?;
            let cfg = load_config(&config).map_err(CliError::input)?;
            let report = validate::cmd_validate(&cfg, trials(n)?, seed.unwrap_or(DEFAULT_SEED))?;
            let mut w = sink(&out)?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(CliError::failure)?;
            writeln!(w).map_err(CliError::failure)?;
            match report.first_failure {
                Some(name) => Err(CliError::Failure(format!("validation check failed: {name}"))),
                None => Ok(()),
            }
        }
        Command::Simulate { common, mc } => {
            pool(common.workers)?;
            let cfg = load_config(&common.config).map_err(CliError::input)?;
            emit(&cmd_simulate(&cfg, trials(mc.trials)?, mc.seed())?, &common)
        }
    }
}
