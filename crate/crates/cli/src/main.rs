//! `grauert`: batch front end for the Grauert-domain toolkit.
//!
//! Exit codes: 0 success, 1 usage or data error, 2 verification failure.

mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grauert::catalog::Catalog;
use thiserror::Error;

use crate::commands::Report;

#[derive(Parser, Debug)]
#[command(name = "grauert", version, about = "Maximal Grauert domains of noncompact symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Space label, e.g. `BDI:p=2,q=1`, `prod(AIII:p=2,q=1)` or a display name.
    #[arg(long, global = true)]
    pub space: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Directory holding catalog.json, jaffee_pairs.json and golden_table.json.
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    /// Worker threads for sampling (default: available processors).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catalog entry, restricted roots and metric normalization.
    Info,
    /// The polytope `omega` as halfspaces and vertices.
    Omega,
    /// Largest radius `r` with the `r`-tube inside the maximal domain.
    Radius,
    /// Rigid, product or Hermitian envelope.
    Classify,
    /// Recompute every row of the classification table.
    Table {
        #[arg(long, default_value_t = 6)]
        max_pq: u32,
        #[arg(long, default_value_t = 8)]
        max_n: u32,
    },
    /// Adapted complex structure blocks on a grid `z = t + is`.
    Adapted {
        /// Direction `H` as comma-separated rationals (default: sum of positive roots).
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Half-width of the `t` range (default: the boundary parameter `s*`).
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Positive-definiteness of the Hessian and Levi matrix at sampled points.
    PshCheck {
        /// Points projected onto root walls (default: a tenth of the samples).
        #[arg(long)]
        non_regular: Option<usize>,
    },
    /// Table consistency, criterion agreement on embeddings, Hermitian cubes.
    Audit {
        #[arg(long, default_value_t = 6)]
        max_pq: u32,
        #[arg(long, default_value_t = 8)]
        max_n: u32,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] grauert::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    if let Some(j) = c.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let catalog: &'static Catalog = match &c.data_dir {
        Some(dir) => Box::leak(Box::new(Catalog::from_dir(dir)?)),
        None => Catalog::builtin(),
    };
    match &cli.command {
        Command::Info => commands::info(catalog, c),
        Command::Omega => commands::omega(catalog, c),
        Command::Radius => commands::radius(catalog, c),
        Command::Classify => commands::classify(catalog, c),
        Command::Table { max_pq, max_n } => commands::table(catalog, *max_pq, *max_n),
        Command::Adapted { h, grid, t_max } => commands::adapted(catalog, c, h.as_deref(), *grid, *t_max),
        Command::PshCheck { non_regular } => commands::psh_check(catalog, c, *non_regular),
        Command::Audit { max_pq, max_n } => commands::audit(catalog, *max_pq, *max_n),
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Table { .. } => Format::Text,
        Command::Adapted { .. } => Format::Csv,
        _ => Format::Json,
    }
}

fn emit(report: &Report, format: Format, out: Option<&PathBuf>) -> std::io::Result<()> {
    let body = report.render(format);
    match out {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.common.format.unwrap_or_else(|| default_format(&cli.command));
    let out = cli.common.out.clone();
    match run(cli) {
        Ok(report) => {
            if let Err(e) = emit(&report, format, out.as_ref()) {
                eprintln!("error: {}", CliError::from(e));
                return ExitCode::from(1);
            }
            match &report.failure {
                Some(why) => {
                    eprintln!("verification failed: {why}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
