mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::*;
use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bi-waves",
    version,
    about = "Standing waves of the scalar Born-Infeld equation"
)]
struct Cli {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent). CSV output also writes `<stem>.meta.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Truncated dispersion relation ω²/k² against ε.
    Dispersion(DispersionArgs),
    /// Normalized residual F(ε) of the truncated series for several orders.
    Fig1(Fig1Args),
    /// Lindstedt series against the exact parametric solution.
    Compare(CompareArgs),
    /// Exact coefficient tables.
    LindstedtTable {
        #[command(flatten)]
        args: TableArgs,
        /// Emit the full trigonometric series instead of the coefficient table.
        #[arg(long)]
        dump_series: bool,
    },
    /// Build the parametric solution for sine-series initial data.
    Parametric(ParametricArgs),
    /// Closed-form example field on a grid.
    Example(ExampleArgs),
    /// Magnetic background: first-order dispersion, K/L and phase velocity.
    Background(BackgroundArgs),
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Compare(_) | Command::LindstedtTable { .. } | Command::Background(_) => {
                Format::Json
            }
            _ => Format::Csv,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BI_WAVES_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "BI_WAVES_THREADS must be a non-negative integer, got {raw:?}"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn emit(rendered: Rendered, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        None => print!("{}", rendered.body),
        Some(path) => {
            write(&path, &rendered.body)?;
            if let Some(meta) = rendered.meta {
                let mut text =
                    serde_json::to_string_pretty(&meta).expect("json values always serialize");
                text.push('\n');
                write(&path.with_extension("meta.json"), &text)?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let output = cfg.output.clone().unwrap_or_default();
    let format = cli
        .format
        .or(output.format)
        .unwrap_or_else(|| cli.command.default_format());
    let out = cli.out.clone().or(output.path.map(PathBuf::from));
    let rendered = match &cli.command {
        Command::Dispersion(a) => dispersion(a, &cfg, format)?,
        Command::Fig1(a) => fig1(a, &cfg, format)?,
        Command::Compare(a) => compare(a, &cfg, format)?,
        Command::LindstedtTable { args, dump_series } => {
            lindstedt_table(args, &cfg, format, *dump_series)?
        }
        Command::Parametric(a) => parametric(a, &cfg, format)?,
        Command::Example(a) => example(a, &cfg, format)?,
        Command::Background(a) => background(a, &cfg, format)?,
    };
    emit(rendered, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let diag = serde_json::json!({"error": e.name(), "message": e.to_string()});
            eprintln!("{diag}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
