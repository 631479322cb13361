//! `ncgauge`: verification reports for finite real spectral triples, their
//! localization, inner fluctuations and toric sphere scans.

mod commands;
mod config;
mod document;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncgauge::numerics::Tolerances;

use crate::document::Document;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad model spec: {0}")]
    Model(#[from] ncgauge::models::ModelError),
    #[error("bad config: {0}")]
    Config(String),
    #[error("bad argument: {0}")]
    Argument(String),
    #[error("bad polynomial: {0}")]
    Polynomial(#[from] ncgauge::nctorus::ParseError),
    #[error("{0}")]
    Computation(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SphereArg {
    S3,
    S4,
}

#[derive(Debug, Parser)]
#[command(name = "ncgauge", version, about)]
pub struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for presets and random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// One tolerance for every check, replacing the default ladder.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format; toric scans default to CSV, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Axioms, A_J and gauge algebra of a model.
    Check {
        /// Preset such as `ym:k=2,N=2,seed=7`, or a TOML triple file.
        model: String,
    },
    /// Fibers over the points of the base, with the section and bundle checks.
    Localize { model: String },
    /// Inner fluctuation by `zero`, `pure[:seed=S]` or `random[:seed=S]`.
    Fluctuate { model: String, perturbation: String },
    /// Fiber norms and dimensions of a toric sphere polynomial over a grid.
    ToricScan {
        #[arg(value_enum)]
        sphere: SphereArg,
        p: i64,
        q: i64,
        h: f64,
        /// Polynomial in a, ad, b, bd (and x on s4).
        #[arg(long, default_value = "a*b + bd*ad")]
        poly: String,
        /// Also write the JSON report here when the main output is CSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

pub struct Settings {
    pub seed: Option<u64>,
    pub tol: Tolerances,
    pub tol_override: Option<f64>,
}

/// What a command produced: a report document and, optionally, a table.
pub struct Output {
    pub document: Document,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let tol = match cli.tol {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            return Err(CliError::Argument(format!(
                "--tol must be positive, got {t}"
            )))
        }
        Some(t) => Tolerances::uniform(t),
        None => Tolerances::default(),
    };
    Ok(Settings {
        seed: cli.seed,
        tol,
        tol_override: cli.tol,
    })
}

fn write_table(table: &Table, sink: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(cli: &Cli, out: &Output, default: Format) -> Result<(), CliError> {
    let format = cli.format.unwrap_or(default);
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match (format, &out.table) {
        (Format::Csv, Some(table)) => {
            write_table(table, &mut sink)?;
            eprintln!("{}", out.document.summary());
        }
        (Format::Csv, None) => {
            write_table(&out.document.check_table(), &mut sink)?;
        }
        (Format::Json, _) => {
            serde_json::to_writer_pretty(&mut sink, &out.document)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    if let Command::ToricScan {
        report: Some(path), ..
    } = &cli.command
    {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut file, &out.document)?;
        writeln!(file)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let s = settings(cli)?;
    let (out, default) = match &cli.command {
        Command::Check { model } => (commands::check(model, &s)?, Format::Json),
        Command::Localize { model } => (commands::localize(model, &s)?, Format::Json),
        Command::Fluctuate {
            model,
            perturbation,
        } => (commands::fluctuate(model, perturbation, &s)?, Format::Json),
        Command::ToricScan {
            sphere,
            p,
            q,
            h,
            poly,
            ..
        } => (
            commands::toric_scan(*sphere, *p, *q, *h, poly, &s)?,
            Format::Csv,
        ),
    };
    emit(cli, &out, default)?;
    Ok(out.document.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
