//! Scenario documents (TOML or JSON) and their validated SI form.
//!
//! Keys carry their unit as a suffix (`wavelength_nm`, `waist_cm`, ...).
//! The document is kept next to the resolved values so that it can be
//! written back verbatim and hashed.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hgpol_core::beam::BeamParams;
use hgpol_core::num_complex::Complex;
use hgpol_core::polarization::PolarizationSource;
use hgpol_core::turbulence::{Cn2Model, PathKind, TurbulenceProfile};
use hgpol_core::MAX_BEAM_ORDER;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub wavelength_nm: f64,
    pub waist_cm: f64,
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub gamma_xx: f64,
    pub gamma_yy: f64,
    pub gamma_xy: f64,
    #[serde(default)]
    pub gamma_xy_imag: f64,
    pub sigma0_xx_cm: f64,
    pub sigma0_yy_cm: f64,
    pub sigma0_xy_cm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileModel {
    HufnagelValley,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurbulenceSection {
    pub model: ProfileModel,
    /// `C_n^2(0)` in m^-2/3
    pub cn2_ground_m23: f64,
    pub wind_rms_m_per_s: f64,
    pub inner_scale_mm: f64,
    #[serde(default)]
    pub ground_altitude_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub kinds: Vec<String>,
    pub zenith_deg: f64,
    /// Fixed distances, one curve each. Ignored by distance sweeps.
    #[serde(default)]
    pub distances_km: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Distance,
    Order,
    Sigma0,
    Zenith,
    RadialProfile,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Distance => "distance",
            Self::Order => "order",
            Self::Sigma0 => "sigma0",
            Self::Zenith => "zenith",
            Self::RadialProfile => "radial_profile",
        }
    }

    /// Converts a grid value in `unit` to SI.
    pub fn to_si(self, unit: &str, value: f64) -> Option<f64> {
        self.units()
            .iter()
            .find(|(u, ..)| *u == unit)
            .map(|&(_, num, den)| value * num / den)
    }

    /// Converts an SI value back to `unit`.
    pub fn from_si(self, unit: &str, value: f64) -> Option<f64> {
        self.units()
            .iter()
            .find(|(u, ..)| *u == unit)
            .map(|&(_, num, den)| value * den / num)
    }

    /// Accepted units as `(name, numerator, denominator)` of the SI factor;
    /// dividing by exact powers of ten keeps e.g. 3 cm equal to 0.03.
    fn units(self) -> &'static [(&'static str, f64, f64)] {
        match self {
            Self::Distance => &[("m", 1.0, 1.0), ("km", 1e3, 1.0)],
            Self::Order => &[("", 1.0, 1.0)],
            Self::Sigma0 | Self::RadialProfile => {
                &[("mm", 1.0, 1e3), ("cm", 1.0, 1e2), ("m", 1.0, 1.0)]
            }
            Self::Zenith => &[("deg", std::f64::consts::PI, 180.0), ("rad", 1.0, 1.0)],
        }
    }
}

/// Direction of a radial profile in the receiver plane.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileAxis {
    X,
    Y,
    #[default]
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    #[serde(default)]
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linspace: Option<Linspace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<ProfileAxis>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    #[serde(rename = "csv")]
    Csv,
    #[serde(rename = "csv+svg")]
    CsvSvg,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "csv+svg" => Ok(Self::CsvSvg),
            other => Err(format!(
                "unknown format {other:?} (expected csv or csv+svg)"
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// A scenario file as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    /// Label written to the `figure` column and used for file names.
    pub figure: String,
    pub beam: BeamSection,
    pub source: SourceSection,
    pub turbulence: TurbulenceSection,
    pub paths: PathsSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Grid in SI units (orders as plain numbers).
    pub grid: Vec<f64>,
    pub axis: ProfileAxis,
}

/// Validated scenario with every quantity in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub document: ScenarioDocument,
    pub beam: BeamParams<f64>,
    pub source: PolarizationSource<f64>,
    pub profile: TurbulenceProfile<f64>,
    pub paths: Vec<PathKind>,
    pub zenith: f64,
    pub distances: Vec<f64>,
    pub sweep: SweepSpec,
}

impl ScenarioDocument {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario documents always serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario documents always serialize")
    }

    fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let s = &self.sweep;
        let raw = match (&s.values, &s.linspace) {
            (Some(v), None) => v.clone(),
            (None, Some(l)) => {
                if l.count < 2 {
                    return Err(invalid("sweep.linspace.count", "must be >= 2"));
                }
                let step = (l.stop - l.start) / (l.count - 1) as f64;
                (0..l.count)
                    .map(|i| {
                        if i + 1 == l.count {
                            l.stop
                        } else {
                            l.start + step * i as f64
                        }
                    })
                    .collect()
            }
            _ => {
                return Err(invalid(
                    "sweep",
                    "give exactly one of `values` or `linspace`",
                ))
            }
        };
        if raw.is_empty() {
            return Err(invalid("sweep.values", "grid is empty"));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sweep.values", "grid values must be finite"));
        }
        if raw.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sweep.values", "grid must be strictly increasing"));
        }
        if s.variable.to_si(&s.unit, 1.0).is_none() {
            let known: Vec<_> = s
                .variable
                .units()
                .iter()
                .map(|(u, ..)| format!("{u:?}"))
                .collect();
            return Err(invalid(
                "sweep.unit",
                format!(
                    "{:?} is not a unit for {} (expected one of {})",
                    s.unit,
                    s.variable.as_str(),
                    known.join(", ")
                ),
            ));
        }
        let grid: Vec<f64> = raw
            .iter()
            .filter_map(|&v| s.variable.to_si(&s.unit, v))
            .collect();
        let first = grid[0];
        let last = grid[grid.len() - 1];
        match s.variable {
            SweepVariable::Distance if first <= 0.0 => {
                Err(invalid("sweep.values", "distances must be > 0"))
            }
            SweepVariable::Sigma0 if first <= 0.0 => {
                Err(invalid("sweep.values", "correlation lengths must be > 0"))
            }
            SweepVariable::Zenith if first < 0.0 || last >= FRAC_PI_2 => Err(invalid(
                "sweep.values",
                "zenith angles must lie in [0, 90) degrees",
            )),
            SweepVariable::Order
                if grid
                    .iter()
                    .any(|v| v.fract() != 0.0 || *v < 0.0 || *v > MAX_BEAM_ORDER as f64) =>
            {
                Err(invalid(
                    "sweep.values",
                    format!("orders must be integers in 0..={MAX_BEAM_ORDER}"),
                ))
            }
            _ => Ok(grid),
        }
    }

    /// Checks every invariant and converts to SI.
    pub fn resolve(self) -> Result<ScenarioConfig, ConfigError> {
        let b = &self.beam;
        let beam = BeamParams::new(b.wavelength_nm / 1e9, b.waist_cm / 1e2, b.m, b.n)
            .map_err(core("beam"))?;

        let s = &self.source;
        let source = PolarizationSource::new(
            s.gamma_xx,
            s.gamma_yy,
            Complex::new(s.gamma_xy, s.gamma_xy_imag),
            s.sigma0_xx_cm / 1e2,
            s.sigma0_yy_cm / 1e2,
            s.sigma0_xy_cm / 1e2,
        )
        .map_err(core("source"))?;

        let t = &self.turbulence;
        let mut profile = TurbulenceProfile::new(
            t.cn2_ground_m23,
            t.wind_rms_m_per_s,
            t.inner_scale_mm / 1e3,
            t.ground_altitude_m,
        )
        .map_err(core("turbulence"))?;
        profile.model = match t.model {
            ProfileModel::HufnagelValley => Cn2Model::HufnagelValley,
            ProfileModel::Constant => Cn2Model::Constant,
        };

        if self.paths.kinds.is_empty() {
            return Err(invalid("paths.kinds", "at least one path kind is required"));
        }
        let mut paths = Vec::new();
        for k in &self.paths.kinds {
            let kind: PathKind = k.parse().map_err(|e| invalid("paths.kinds", e))?;
            if paths.contains(&kind) {
                return Err(invalid("paths.kinds", format!("{kind} listed twice")));
            }
            paths.push(kind);
        }
        let zenith_deg = self.paths.zenith_deg;
        if !(0.0..90.0).contains(&zenith_deg) {
            return Err(invalid("paths.zenith_deg", "must lie in [0, 90)"));
        }
        let distances: Vec<f64> = self.paths.distances_km.iter().map(|d| d * 1e3).collect();
        if distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(invalid(
                "paths.distances_km",
                "distances must be finite and > 0",
            ));
        }
        if distances.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("paths.distances_km", "must be strictly increasing"));
        }

        let variable = self.sweep.variable;
        if variable != SweepVariable::Distance && distances.is_empty() {
            return Err(invalid(
                "paths.distances_km",
                format!(
                    "at least one distance is required for {} sweeps",
                    variable.as_str()
                ),
            ));
        }
        if self.sweep.axis.is_some() && variable != SweepVariable::RadialProfile {
            return Err(invalid(
                "sweep.axis",
                "only meaningful for radial_profile sweeps",
            ));
        }
        let grid = self.grid()?;

        Ok(ScenarioConfig {
            beam,
            source,
            profile,
            paths,
            zenith: zenith_deg.to_radians(),
            distances,
            sweep: SweepSpec {
                variable,
                grid,
                axis: self.sweep.axis.unwrap_or_default(),
            },
            document: self,
        })
    }
}

fn core(field: &'static str) -> impl Fn(hgpol_core::Error) -> ConfigError {
    move |e| invalid(field, e)
}

fn parse_error(path: &Path, message: impl fmt::Display) -> ConfigError {
    ConfigError::Parse {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

/// Parses a document; `.json` files are read as JSON, anything else as TOML.
pub fn parse_document(text: &str, path: &Path) -> Result<ScenarioDocument, ConfigError> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(text).map_err(|e| parse_error(path, e))
    } else {
        toml::from_str(text).map_err(|e| parse_error(path, e))
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_document(&text, path)?.resolve()
}

/// The shipped default scenario.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

pub fn default_document() -> ScenarioDocument {
    toml::from_str(DEFAULT_CONFIG).expect("shipped default config parses")
}

impl ScenarioConfig {
    /// Short SHA-256 of the canonical TOML form of the document.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.document.to_toml().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
