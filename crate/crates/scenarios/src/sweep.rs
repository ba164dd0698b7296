//! Parameter sweeps over a resolved scenario.

use hgpol_core::beam::Observation;
use hgpol_core::polarization::{coherence_matrix_with, degree_of_polarization, PolarizationSource};
use hgpol_core::turbulence::{effective_inverse_rho2, PathKind, PathSpec};
use rayon::prelude::*;

use crate::config::{ProfileAxis, ScenarioConfig, SweepVariable};

/// One evaluated point. Numeric fields are `None` when the point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub figure: String,
    pub path_kind: PathKind,
    pub z: f64,
    pub zenith: f64,
    pub m: usize,
    pub n: usize,
    pub sigma0_xx: f64,
    pub rho_x: f64,
    pub rho_y: f64,
    pub dop: Option<f64>,
    /// Trace of the coherence matrix normalized by the curve maximum;
    /// filled for radial profiles only.
    pub normalized_intensity: Option<f64>,
    pub inverse_rho2: Option<f64>,
    /// `"ok"` or `"error: ..."`.
    pub status: String,
    pub config_hash: String,
    /// Curve the row belongs to, in declared order.
    pub curve: usize,
    trace: Option<f64>,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    curve: usize,
    kind: PathKind,
    z: f64,
    zenith: f64,
    m: usize,
    n: usize,
    sigma_scale: f64,
    rho_x: f64,
    rho_y: f64,
}

fn points(config: &ScenarioConfig) -> Vec<Point> {
    let sweep = &config.sweep;
    let base = Point {
        curve: 0,
        kind: PathKind::FreeSpace,
        z: 0.0,
        zenith: config.zenith,
        m: config.beam.order_x,
        n: config.beam.order_y,
        sigma_scale: 1.0,
        rho_x: 0.0,
        rho_y: 0.0,
    };
    let apply = |p: Point, v: f64| match sweep.variable {
        SweepVariable::Distance => Point { z: v, ..p },
        SweepVariable::Order => Point {
            m: v as usize,
            n: v as usize,
            ..p
        },
        SweepVariable::Sigma0 => Point {
            sigma_scale: v / config.source.sigma0_xx,
            ..p
        },
        SweepVariable::Zenith => Point { zenith: v, ..p },
        SweepVariable::RadialProfile => match sweep.axis {
            ProfileAxis::X => Point { rho_x: v, ..p },
            ProfileAxis::Y => Point { rho_y: v, ..p },
            ProfileAxis::Diagonal => Point {
                rho_x: v,
                rho_y: v,
                ..p
            },
        },
    };

    // A distance sweep has one curve per path kind; every other sweep has
    // one per (path kind, fixed distance).
    let distances: Vec<Option<f64>> = if sweep.variable == SweepVariable::Distance {
        vec![None]
    } else {
        config.distances.iter().map(|&d| Some(d)).collect()
    };
    let mut out = Vec::new();
    let mut curve = 0;
    for &kind in &config.paths {
        for d in &distances {
            for &v in &sweep.grid {
                let p = Point {
                    curve,
                    kind,
                    z: d.unwrap_or(0.0),
                    ..base
                };
                out.push(apply(p, v));
            }
            curve += 1;
        }
    }
    out
}

struct Evaluated {
    inverse_rho2: f64,
    trace: f64,
    dop: f64,
}

fn evaluate(config: &ScenarioConfig, p: &Point) -> hgpol_core::Result<Evaluated> {
    let beam = config.beam.with_orders(p.m, p.n);
    let source: PolarizationSource<f64> = config.source.with_sigma_scale(p.sigma_scale);
    let path = PathSpec::new(p.kind, p.zenith, p.z, config.profile)?;
    let inverse_rho2 = effective_inverse_rho2(&path, beam.wavenumber())?;
    let matrix = coherence_matrix_with(
        &beam,
        &source,
        inverse_rho2,
        &Observation::new(p.rho_x, p.rho_y, p.z),
    )?;
    Ok(Evaluated {
        inverse_rho2,
        trace: matrix.trace(),
        dop: degree_of_polarization(&matrix)?,
    })
}

/// Evaluates every (path kind, curve, grid point) combination.
///
/// Rows come back in declared order regardless of scheduling. A failing
/// point yields a row with an error status instead of aborting the sweep.
pub fn run_sweep(config: &ScenarioConfig) -> Vec<Row> {
    let hash = config.hash();
    let mut rows: Vec<Row> = points(config)
        .par_iter()
        .map(|p| {
            let result = evaluate(config, p);
            let (status, ev) = match result {
                Ok(ev) => ("ok".to_string(), Some(ev)),
                Err(e) => (format!("error: {e}"), None),
            };
            Row {
                figure: config.document.figure.clone(),
                path_kind: p.kind,
                z: p.z,
                zenith: p.zenith,
                m: p.m,
                n: p.n,
                sigma0_xx: config.source.sigma0_xx * p.sigma_scale,
                rho_x: p.rho_x,
                rho_y: p.rho_y,
                dop: ev.as_ref().map(|e| e.dop),
                normalized_intensity: None,
                inverse_rho2: ev.as_ref().map(|e| e.inverse_rho2),
                status,
                config_hash: hash.clone(),
                curve: p.curve,
                trace: ev.as_ref().map(|e| e.trace),
            }
        })
        .collect();

    if config.sweep.variable == SweepVariable::RadialProfile {
        let curves = rows.last().map_or(0, |r| r.curve + 1);
        for c in 0..curves {
            let max = rows
                .iter()
                .filter(|r| r.curve == c)
                .filter_map(|r| r.trace)
                .fold(0.0, f64::max);
            for r in rows.iter_mut().filter(|r| r.curve == c) {
                r.normalized_intensity = r.trace.filter(|_| max > 0.0).map(|t| t / max);
            }
        }
    }
    rows
}

/// Runs on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(
    config: &ScenarioConfig,
    threads: usize,
) -> Result<Vec<Row>, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    Ok(pool.install(|| run_sweep(config)))
}
