use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use hgpol_scenarios::{
    default_out_dir, load_config, reproduce_figure, write_outputs, FigureId, OutputFormat,
    RunReport,
};

/// Polarization of partially coherent Hermite-Gaussian beams along
/// turbulent paths: scenario sweeps and figure reproduction.
#[derive(Parser)]
#[command(name = "hgpol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a scenario file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: config `output.dir`, then $HGPOL_OUT_DIR, then ./hgpol-out)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Reproduce a figure preset: fig1..fig5 or table1
    Figure {
        id: FigureId,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a scenario file without running it
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn report(r: &RunReport) -> ExitCode {
    for f in &r.files {
        println!("wrote {}", f.display());
    }
    if r.failed_rows > 0 {
        eprintln!(
            "{} of {} rows failed; see the status column",
            r.failed_rows, r.rows
        );
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            threads,
        } => {
            let cfg = load_config(&config)?;
            let dir = out
                .or_else(|| cfg.document.output.dir.clone())
                .unwrap_or_else(default_out_dir);
            let format = format.unwrap_or(cfg.document.output.format);
            let stem = cfg.document.figure.clone();
            Ok(report(&write_outputs(
                &stem,
                &[cfg],
                &dir,
                format,
                threads,
            )?))
        }
        Command::Figure {
            id,
            out,
            format,
            threads,
        } => {
            let dir = out.unwrap_or_else(default_out_dir);
            Ok(report(&reproduce_figure(id, &dir, format, threads)?))
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let points = cfg.paths.len() * cfg.sweep.grid.len() * cfg.distances.len().max(1);
            println!(
                "{}: ok ({} sweep over {} values, {} path kinds, config hash {}, about {points} rows)",
                config.display(),
                cfg.sweep.variable.as_str(),
                cfg.sweep.grid.len(),
                cfg.paths.len(),
                cfg.hash()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
