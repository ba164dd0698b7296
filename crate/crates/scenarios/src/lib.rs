//! Scenario files, parameter sweeps and figure presets on top of
//! `hgpol-core`, plus the writers behind the `hgpol` command.

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub use config::{load_config, ConfigError, OutputFormat, ScenarioConfig, ScenarioDocument};
pub use figures::FigureId;
pub use sweep::{run_sweep, Row};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HGPOL_OUT_DIR";

/// Output directory when neither the command line nor the config names one.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("hgpol-out"), PathBuf::from)
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub failed_rows: usize,
}

fn run_all(
    configs: &[ScenarioConfig],
    threads: Option<usize>,
) -> Result<Vec<(ScenarioConfig, Vec<Row>)>> {
    configs
        .iter()
        .map(|c| {
            let rows = match threads {
                Some(n) => sweep::run_sweep_with_threads(c, n).context("building thread pool")?,
                None => run_sweep(c),
            };
            Ok((c.clone(), rows))
        })
        .collect()
}

/// Runs every scenario, then writes `<stem>.csv`, `<stem>.manifest.json`
/// and optionally SVG charts into `dir`.
pub fn write_outputs(
    stem: &str,
    configs: &[ScenarioConfig],
    dir: &Path,
    format: OutputFormat,
    threads: Option<usize>,
) -> Result<RunReport> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let runs = run_all(configs, threads)?;
    let rows: Vec<Row> = runs.iter().flat_map(|(_, r)| r.iter().cloned()).collect();

    let csv_name = format!("{stem}.csv");
    let csv_path = dir.join(&csv_name);
    let file =
        File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    output::write_csv(&rows, BufWriter::new(file))?;

    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    output::write_json(
        &manifest_path,
        &output::manifest(stem, &csv_name, configs, &rows),
    )?;

    let mut files = vec![csv_path, manifest_path];
    if format == OutputFormat::CsvSvg {
        files.extend(output::write_svgs(dir, stem, &runs)?);
    }
    Ok(RunReport {
        files,
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| !r.is_ok()).count(),
    })
}

/// Reproduces one figure or the altitude table.
pub fn reproduce_figure(
    id: FigureId,
    dir: &Path,
    format: OutputFormat,
    threads: Option<usize>,
) -> Result<RunReport> {
    if id == FigureId::Table1 {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let rows = figures::table1();
        let path = dir.join("table1.csv");
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        output::write_table1_csv(&rows, BufWriter::new(file))?;
        return Ok(RunReport {
            files: vec![path],
            rows: rows.len(),
            failed_rows: rows.iter().filter(|r| !r.matches).count(),
        });
    }
    let configs = figures::figure_documents(id)
        .into_iter()
        .map(ScenarioDocument::resolve)
        .collect::<Result<Vec<_>, _>>()
        .context("figure preset failed validation")?;
    write_outputs(id.as_str(), &configs, dir, format, threads)
}
