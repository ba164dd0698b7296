//! Figure presets built from the shipped default scenario.

use std::fmt;
use std::str::FromStr;

use hgpol_core::turbulence::{cn2_at_altitude, TurbulenceProfile};

use crate::config::{
    default_document, Linspace, ProfileAxis, ScenarioDocument, SweepSection, SweepVariable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Table1,
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Table1,
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Table1 => "table1",
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown figure {s:?} (expected fig1..fig5 or table1)"))
    }
}

fn linspace(
    variable: SweepVariable,
    unit: &str,
    start: f64,
    stop: f64,
    count: usize,
) -> SweepSection {
    SweepSection {
        variable,
        unit: unit.to_string(),
        values: None,
        linspace: Some(Linspace { start, stop, count }),
        axis: None,
    }
}

fn base(id: FigureId) -> ScenarioDocument {
    let mut doc = default_document();
    doc.figure = id.to_string();
    doc
}

/// Scenario documents making up a figure. Empty for `table1`, which is a
/// profile evaluation rather than a sweep.
pub fn figure_documents(id: FigureId) -> Vec<ScenarioDocument> {
    match id {
        FigureId::Table1 => Vec::new(),
        FigureId::Fig1 => {
            // Profile half-widths cover the beam down to ~1e-3 of its peak.
            [
                (1.0, "cm", 15.0),
                (5.0, "cm", 50.0),
                (20.0, "m", 3.0),
                (50.0, "m", 10.0),
            ]
            .into_iter()
            .map(|(z_km, unit, half)| {
                let mut doc = base(id);
                doc.beam.m = 4;
                doc.beam.n = 4;
                doc.paths.distances_km = vec![z_km];
                doc.sweep = SweepSection {
                    axis: Some(ProfileAxis::Diagonal),
                    ..linspace(SweepVariable::RadialProfile, unit, -half, half, 121)
                };
                doc
            })
            .collect()
        }
        FigureId::Fig2 => {
            let mut doc = base(id);
            doc.sweep = linspace(SweepVariable::Distance, "km", 0.01, 20.0, 200);
            vec![doc]
        }
        FigureId::Fig3 => {
            let mut doc = base(id);
            doc.paths.distances_km = vec![10.0];
            doc.sweep = SweepSection {
                variable: SweepVariable::Order,
                unit: String::new(),
                values: Some((0..=10).map(f64::from).collect()),
                linspace: None,
                axis: None,
            };
            vec![doc]
        }
        FigureId::Fig4 => [0.1, 10.0]
            .into_iter()
            .map(|sigma_cm| {
                let mut doc = base(id);
                doc.source.sigma0_xx_cm = sigma_cm;
                doc.source.sigma0_yy_cm = sigma_cm;
                doc.source.sigma0_xy_cm = 2.0 * sigma_cm;
                doc.sweep = linspace(SweepVariable::Distance, "km", 0.05, 10.0, 200);
                doc
            })
            .collect(),
        FigureId::Fig5 => {
            let mut doc = base(id);
            doc.paths.distances_km = vec![1.0, 5.0, 20.0];
            doc.sweep = linspace(SweepVariable::Zenith, "deg", 0.0, 89.5, 180);
            vec![doc]
        }
    }
}

/// One row of the altitude table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub altitude: f64,
    pub cn2: f64,
    /// value as printed in the reference table
    pub reference: f64,
    pub relative_deviation: f64,
    /// within 1 % or equal at the printed number of significant figures
    pub matches: bool,
}

pub fn table1() -> Vec<Table1Row> {
    let profile = TurbulenceProfile::<f64>::default();
    [
        (0.0, 1.0, -14, 1),
        (100.0, 3.93, -15, 3),
        (200.0, 1.59, -15, 3),
        (256.0, 1.0, -15, 1),
        (300.0, 7.19, -16, 3),
        (800.0, 1.62, -16, 3),
        (1485.0, 1.0, -16, 1),
    ]
    .into_iter()
    .map(|(altitude, mantissa, exponent, digits)| {
        let cn2 = cn2_at_altitude(&profile, altitude).expect("altitudes are non-negative");
        let reference = mantissa * 10f64.powi(exponent);
        let relative_deviation = (cn2 - reference) / reference;
        let scale = 10f64.powi(digits - 1);
        let as_printed = (cn2 / 10f64.powi(exponent) * scale).round() / scale == mantissa;
        Table1Row {
            altitude,
            cn2,
            reference,
            relative_deviation,
            matches: relative_deviation.abs() <= 0.01 || as_printed,
        }
    })
    .collect()
}
