//! CSV, manifest and SVG writers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use plotters::prelude::*;
use serde_json::{json, Value};

use crate::config::{ProfileAxis, ScenarioConfig, SweepVariable};
use crate::figures::Table1Row;
use crate::sweep::Row;

pub const CSV_HEADER: [&str; 14] = [
    "figure",
    "path_kind",
    "z_m",
    "zenith_rad",
    "m",
    "n",
    "sigma0xx_m",
    "rho_x_m",
    "rho_y_m",
    "P",
    "I_norm",
    "inv_rho2_m2",
    "status",
    "config_hash",
];

/// Nine significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.8e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.figure.clone(),
            r.path_kind.to_string(),
            fmt_float(r.z),
            fmt_float(r.zenith),
            r.m.to_string(),
            r.n.to_string(),
            fmt_float(r.sigma0_xx),
            fmt_float(r.rho_x),
            fmt_float(r.rho_y),
            fmt_opt(r.dop),
            fmt_opt(r.normalized_intensity),
            fmt_opt(r.inverse_rho2),
            r.status.clone(),
            r.config_hash.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table1_csv<W: std::io::Write>(rows: &[Table1Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "altitude_m",
        "cn2_m23",
        "table_cn2_m23",
        "relative_deviation",
        "status",
    ])?;
    for r in rows {
        w.write_record([
            fmt_float(r.altitude),
            fmt_float(r.cn2),
            fmt_float(r.reference),
            fmt_float(r.relative_deviation),
            if r.matches { "ok" } else { "mismatch" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn resolved(config: &ScenarioConfig) -> Value {
    let s = &config.source;
    let p = &config.profile;
    json!({
        "wavelength_m": config.beam.wavelength,
        "waist_m": config.beam.waist,
        "m": config.beam.order_x,
        "n": config.beam.order_y,
        "gamma_xx": s.gamma_xx,
        "gamma_yy": s.gamma_yy,
        "gamma_xy": [s.gamma_xy.re, s.gamma_xy.im],
        "sigma0_xx_m": s.sigma0_xx,
        "sigma0_yy_m": s.sigma0_yy,
        "sigma0_xy_m": s.sigma0_xy,
        "cn2_ground_m23": p.cn2_ground,
        "wind_rms_m_per_s": p.wind_rms,
        "inner_scale_m": p.inner_scale,
        "ground_altitude_m": p.ground_altitude,
        "paths": config.paths.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        "zenith_rad": config.zenith,
        "distances_m": config.distances,
        "sweep_variable": config.sweep.variable.as_str(),
        "sweep_grid_si": config.sweep.grid,
    })
}

/// Sidecar describing what produced a CSV. Contains no timestamps so that
/// identical inputs give identical files.
pub fn manifest(figure: &str, csv_name: &str, configs: &[ScenarioConfig], rows: &[Row]) -> Value {
    json!({
        "software": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        "figure": figure,
        "csv": csv_name,
        "rows": rows.len(),
        "failed_rows": rows.iter().filter(|r| !r.is_ok()).count(),
        "scenarios": configs.iter().map(|c| json!({
            "config_hash": c.hash(),
            "document": serde_json::to_value(&c.document).expect("documents serialize"),
            "resolved": resolved(c),
        })).collect::<Vec<_>>(),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn x_value(config: &ScenarioConfig, row: &Row) -> f64 {
    let si = match config.sweep.variable {
        SweepVariable::Distance => row.z,
        SweepVariable::Order => row.m as f64,
        SweepVariable::Sigma0 => row.sigma0_xx,
        SweepVariable::Zenith => row.zenith,
        SweepVariable::RadialProfile => match config.sweep.axis {
            ProfileAxis::X | ProfileAxis::Diagonal => row.rho_x,
            ProfileAxis::Y => row.rho_y,
        },
    };
    let unit = &config.document.sweep.unit;
    config.sweep.variable.from_si(unit, si).unwrap_or(si)
}

fn curve_label(config: &ScenarioConfig, row: &Row) -> String {
    if config.sweep.variable == SweepVariable::Distance || config.distances.len() < 2 {
        row.path_kind.to_string()
    } else {
        format!("{} z={} km", row.path_kind, row.z / 1e3)
    }
}

type Series = BTreeMap<usize, (String, Vec<(f64, f64)>)>;

fn line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &Series,
) -> Result<()> {
    let points = series.values().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        return Ok(());
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    let pad = ((y1 - y0) * 0.05).max(1e-3);
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, (y0 - pad)..(y1 + pad))?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc(y_label)
        .draw()?;
    for (i, (label, pts)) in series.values().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))?
            .label(label.as_str())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()?;
    root.present()?;
    Ok(())
}

/// Writes one P chart per scenario, plus an intensity chart for radial
/// profiles. Returns the files written.
pub fn write_svgs(
    dir: &Path,
    stem: &str,
    runs: &[(ScenarioConfig, Vec<Row>)],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (i, (config, rows)) in runs.iter().enumerate() {
        let mut dop = BTreeMap::new();
        let mut intensity = BTreeMap::new();
        for r in rows {
            let x = x_value(config, r);
            if let Some(p) = r.dop {
                dop.entry(r.curve)
                    .or_insert_with(|| (curve_label(config, r), Vec::new()))
                    .1
                    .push((x, p));
            }
            if let Some(v) = r.normalized_intensity {
                intensity
                    .entry(r.curve)
                    .or_insert_with(|| (curve_label(config, r), Vec::new()))
                    .1
                    .push((x, v));
            }
        }
        let unit = &config.document.sweep.unit;
        let x_label = if unit.is_empty() {
            config.sweep.variable.as_str().to_string()
        } else {
            format!("{} [{unit}]", config.sweep.variable.as_str())
        };
        let name = if runs.len() == 1 {
            stem.to_string()
        } else {
            format!("{stem}_{}", i + 1)
        };
        let title = format!("{} ({})", config.document.figure, config.hash());

        let p_path = dir.join(format!("{name}.svg"));
        line_chart(&p_path, &title, &x_label, "degree of polarization", &dop)?;
        written.push(p_path);
        if !intensity.is_empty() {
            let i_path = dir.join(format!("{name}_intensity.svg"));
            line_chart(
                &i_path,
                &title,
                &x_label,
                "normalized intensity",
                &intensity,
            )?;
            written.push(i_path);
        }
    }
    Ok(written)
}
