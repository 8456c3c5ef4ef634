//! `suffdata` command-line tool.

mod commands;
mod task;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Sufficient decision datasets for linear programs with uncertain costs.
#[derive(Parser, Debug)]
#[command(name = "suffdata", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantArg {
    Vanilla,
    Experience,
}

/// Options shared by the task-file commands.
#[derive(Args, Debug, Clone)]
pub struct TaskArgs {
    /// JSON task file.
    #[arg(short, long)]
    pub input: PathBuf,

    /// Output file (stdout when absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Relative threshold for treating a coordinate as zero.
    #[arg(long)]
    pub tol_zero: Option<f64>,

    /// Use one linking constant `eps` for all coordinates.
    #[arg(long)]
    pub eps: Option<f64>,

    /// Margin subtracted from every inequality of the uncertainty set.
    #[arg(long)]
    pub sigma_interior: Option<f64>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Basis of the directions spanned by reachable optimal decisions.
    DirBasis {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        seed: u64,
    },
    /// Whether a dataset is sufficient (exit 0) or not (exit 1).
    Check {
        #[command(flatten)]
        task: TaskArgs,
        /// JSON array of queries, overriding the task's `dataset`.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Smallest sufficient subset of the allowed query basis.
    Select {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit a cost to observations and return its optimal decision.
    Decide {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// JSON array of observed values, overriding the task's `observations`.
        #[arg(long)]
        observations: Option<PathBuf>,
    },
    /// Cross-check the solvers against vertex enumeration.
    OracleVerify {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the hiring experiment over a noise grid.
    Hiring {
        /// Output file (stdout when absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the SVG figure here.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        d: usize,
        #[arg(long, value_enum, default_value = "vanilla")]
        variant: VariantArg,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,0.3,0.6")]
        etas: Vec<f64>,
        #[arg(long)]
        seed: u64,
        /// Write 0 for wall times so the output is reproducible.
        #[arg(long)]
        omit_timing: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("SUFFDATA_LOG", "error")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
