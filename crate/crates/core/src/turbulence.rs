//! Turbulence strength along the link.
//!
//! Horizontal links see a constant structure constant and are summarized by
//! the spherical-wave coherence length. Slant links integrate the altitude
//! profile against the path weights `(1-η)^2`, `2η(1-η)` and `η^2`. Both
//! collapse to one number, `1/ρ^2`, which is all the coincident-point
//! intensity needs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, AdaptiveSettings};
use crate::scalar::Real;

/// Inner scale used for every slant-path result unless overridden (m).
///
/// The value is not pinned down by the turbulence model itself; 10 mm is the
/// calibrated value that reproduces the reference slant-path polarization at
/// 10 km (see the acceptance suite).
pub const CALIBRATED_INNER_SCALE: f64 = 0.01;

/// Structure constant of the reference horizontal link (m^-2/3).
pub const REFERENCE_CN2_GROUND: f64 = 1e-14;

/// Reference rms wind speed (m/s).
pub const REFERENCE_WIND_RMS: f64 = 2.1;

const SLANT_PREFACTOR: f64 = 3.2796;
const SPHERICAL_WAVE_CONSTANT: f64 = 0.545;

/// Altitude dependence of `C_n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Cn2Model {
    /// Three-term Hufnagel-Valley profile driven by wind speed and ground value.
    #[default]
    HufnagelValley,
    /// `C_n^2(h) = cn2_ground` at every altitude.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceProfile<T> {
    /// `C_n^2(0)`, m^-2/3.
    pub cn2_ground: T,
    /// rms wind speed, m/s.
    pub wind_rms: T,
    /// inner scale `l_0`, m.
    pub inner_scale: T,
    /// lower altitude limit of slant integrals, m.
    pub ground_altitude: T,
    pub model: Cn2Model,
}

impl<T: Real> Default for TurbulenceProfile<T> {
    fn default() -> Self {
        Self {
            cn2_ground: T::lit(REFERENCE_CN2_GROUND),
            wind_rms: T::lit(REFERENCE_WIND_RMS),
            inner_scale: T::lit(CALIBRATED_INNER_SCALE),
            ground_altitude: T::zero(),
            model: Cn2Model::HufnagelValley,
        }
    }
}

impl<T: Real> TurbulenceProfile<T> {
    pub fn new(cn2_ground: T, wind_rms: T, inner_scale: T, ground_altitude: T) -> Result<Self> {
        let p = Self {
            cn2_ground,
            wind_rms,
            inner_scale,
            ground_altitude,
            model: Cn2Model::HufnagelValley,
        };
        p.validate()?;
        Ok(p)
    }

    /// Altitude-independent profile; mostly useful for analytic checks.
    pub fn constant(cn2: T) -> Self {
        Self {
            cn2_ground: cn2,
            model: Cn2Model::Constant,
            ..Self::default()
        }
    }

    pub fn with_cn2_ground(self, cn2_ground: T) -> Self {
        Self { cn2_ground, ..self }
    }

    pub fn with_inner_scale(self, inner_scale: T) -> Self {
        Self {
            inner_scale,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cn2_ground >= T::zero()) {
            return Err(Error::domain("cn2_ground", "must be >= 0"));
        }
        if !(self.wind_rms >= T::zero()) {
            return Err(Error::domain("wind_rms", "must be >= 0"));
        }
        if !(self.inner_scale > T::zero()) {
            return Err(Error::domain("inner_scale", "must be > 0"));
        }
        if !(self.ground_altitude >= T::zero()) {
            return Err(Error::domain("ground_altitude", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathKind {
    FreeSpace,
    Horizontal,
    SlantUp,
    SlantDown,
}

impl PathKind {
    pub const ALL: [PathKind; 4] = [
        PathKind::FreeSpace,
        PathKind::Horizontal,
        PathKind::SlantUp,
        PathKind::SlantDown,
    ];

    pub fn is_slant(self) -> bool {
        matches!(self, PathKind::SlantUp | PathKind::SlantDown)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PathKind::FreeSpace => "free_space",
            PathKind::Horizontal => "horizontal",
            PathKind::SlantUp => "slant_up",
            PathKind::SlantDown => "slant_down",
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PathKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free_space" => Ok(PathKind::FreeSpace),
            "horizontal" => Ok(PathKind::Horizontal),
            "slant_up" => Ok(PathKind::SlantUp),
            "slant_down" => Ok(PathKind::SlantDown),
            other => Err(Error::domain(
                "path kind",
                format!(
                    "unknown `{other}` (expected free_space, horizontal, slant_up or slant_down)"
                ),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec<T> {
    pub kind: PathKind,
    /// zenith angle, rad; only read for slant paths
    pub zenith: T,
    /// propagation distance, m
    pub distance: T,
    /// ignored for free space
    pub profile: TurbulenceProfile<T>,
}

impl<T: Real> PathSpec<T> {
    pub fn new(
        kind: PathKind,
        zenith: T,
        distance: T,
        profile: TurbulenceProfile<T>,
    ) -> Result<Self> {
        let p = Self {
            kind,
            zenith,
            distance,
            profile,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn free_space(distance: T) -> Self {
        Self {
            kind: PathKind::FreeSpace,
            zenith: T::zero(),
            distance,
            profile: TurbulenceProfile::default(),
        }
    }

    pub fn with_distance(self, distance: T) -> Self {
        Self { distance, ..self }
    }

    pub fn with_kind(self, kind: PathKind) -> Self {
        Self { kind, ..self }
    }

    pub fn with_zenith(self, zenith: T) -> Self {
        Self { zenith, ..self }
    }

    /// Altitude span `H = z cos ξ` of a slant link.
    pub fn altitude_span(&self) -> T {
        self.distance * self.zenith.cos()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > T::zero()) {
            return Err(Error::domain("distance", "must be > 0"));
        }
        if self.kind != PathKind::FreeSpace {
            self.profile.validate()?;
        }
        if self.kind.is_slant() {
            if !(self.zenith >= T::zero() && self.zenith < T::FRAC_PI_2()) {
                return Err(Error::domain(
                    "zenith",
                    "slant paths need 0 <= zenith < pi/2",
                ));
            }
            let span = self.altitude_span();
            if !(span > self.profile.ground_altitude) {
                return Err(Error::domain(
                    "zenith",
                    format!("altitude span {span} m does not exceed the ground altitude"),
                ));
            }
        }
        Ok(())
    }
}

/// Structure constant at altitude `h` (m), in m^-2/3.
pub fn cn2_at_altitude<T: Real>(profile: &TurbulenceProfile<T>, h: T) -> Result<T> {
    if !(h >= T::zero()) {
        return Err(Error::domain("altitude", "must be >= 0"));
    }
    Ok(cn2_unchecked(profile, h))
}

fn cn2_unchecked<T: Real>(profile: &TurbulenceProfile<T>, h: T) -> T {
    match profile.model {
        Cn2Model::Constant => profile.cn2_ground,
        Cn2Model::HufnagelValley => {
            let wind = profile.wind_rms / T::lit(27.0);
            let high = T::lit(0.00594)
                * wind
                * wind
                * (T::lit(1e-5) * h).powi(10)
                * (-h / T::lit(1000.0)).exp();
            let mid = T::lit(2.7e-16) * (-h / T::lit(1500.0)).exp();
            let low = profile.cn2_ground * (-h / T::lit(100.0)).exp();
            high + mid + low
        }
    }
}

/// Spherical-wave coherence length `(0.545 C_n^2 k^2 z)^(-3/5)`, m.
///
/// Returns `+inf` without turbulence.
pub fn rho0_horizontal<T: Real>(wavenumber: T, distance: T, cn2: T) -> Result<T> {
    if !(wavenumber > T::zero()) {
        return Err(Error::domain("wavenumber", "must be > 0"));
    }
    if !(distance > T::zero()) {
        return Err(Error::domain("distance", "must be > 0"));
    }
    if !(cn2 >= T::zero()) {
        return Err(Error::domain("cn2", "must be >= 0"));
    }
    if cn2 == T::zero() {
        return Ok(T::infinity());
    }
    let base = T::lit(SPHERICAL_WAVE_CONSTANT) * cn2 * wavenumber * wavenumber * distance;
    Ok(base.powf(T::lit(-0.6)))
}

/// Slant-path phase coefficients, m^-2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlantCoefficients<T> {
    /// weight `(1-η)^2`
    pub a1: T,
    /// cross term, weight `2η(1-η)`
    pub a2: T,
    /// weight `η^2`; the only one that survives at coincident points
    pub a3: T,
}

fn slant_settings<T: Real>() -> AdaptiveSettings<T> {
    AdaptiveSettings {
        rel_tol: T::lit(1e-10),
        abs_tol: T::zero(),
        max_depth: 50,
        max_intervals: 10_000,
    }
}

pub fn slant_coefficients<T: Real>(
    path: &PathSpec<T>,
    wavenumber: T,
) -> Result<SlantCoefficients<T>> {
    if !path.kind.is_slant() {
        return Err(Error::domain(
            "path kind",
            format!("{} is not a slant path", path.kind),
        ));
    }
    if !(wavenumber > T::zero()) {
        return Err(Error::domain("wavenumber", "must be > 0"));
    }
    path.validate()?;

    let profile = path.profile;
    let span = path.altitude_span();
    let up = path.kind == PathKind::SlantUp;
    let eta = move |h: T| if up { T::one() - h / span } else { h / span };
    let prefactor = T::lit(SLANT_PREFACTOR)
        * wavenumber
        * wavenumber
        * profile.inner_scale.powf(T::lit(-1.0 / 3.0))
        / path.zenith.cos();

    let settings = slant_settings();
    let integral = |weight: &dyn Fn(T) -> T| -> Result<T> {
        integrate(
            |h: T| cn2_unchecked(&profile, h) * weight(eta(h)),
            profile.ground_altitude,
            span,
            &settings,
        )
        .map(|e| e.value)
        .map_err(|e| match e {
            Error::NonConvergence {
                estimate, error, ..
            } => Error::NonConvergence {
                what: "slant-path coefficient",
                estimate,
                error,
            },
            other => other,
        })
    };

    let two = T::lit(2.0);
    Ok(SlantCoefficients {
        a1: prefactor * integral(&|e| (T::one() - e) * (T::one() - e))?,
        a2: prefactor * integral(&|e| two * e * (T::one() - e))?,
        a3: prefactor * integral(&|e| e * e)?,
    })
}

/// Turbulence contribution `1/ρ^2` to the source-plane coherence width at
/// coincident observation points, m^-2.
pub fn effective_inverse_rho2<T: Real>(path: &PathSpec<T>, wavenumber: T) -> Result<T> {
    match path.kind {
        PathKind::FreeSpace => Ok(T::zero()),
        PathKind::Horizontal => {
            path.validate()?;
            let rho0 = rho0_horizontal(wavenumber, path.distance, path.profile.cn2_ground)?;
            Ok(if rho0.is_infinite() {
                T::zero()
            } else {
                T::one() / (rho0 * rho0)
            })
        }
        PathKind::SlantUp | PathKind::SlantDown => {
            Ok(slant_coefficients(path, wavenumber)?.a3 / T::lit(2.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn k800() -> f64 {
        2.0 * PI / 800e-9
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cn2_table_rows() {
        let p = TurbulenceProfile::<f64>::default();
        assert!(rel(cn2_at_altitude(&p, 0.0).unwrap(), 1.027e-14) < 1e-3);
        assert!(rel(cn2_at_altitude(&p, 100.0).unwrap(), 3.93e-15) < 1e-2);
        assert!(rel(cn2_at_altitude(&p, 1485.0).unwrap(), 1e-16) < 1e-2);
    }

    #[test]
    fn cn2_rejects_negative_altitude() {
        let p = TurbulenceProfile::<f64>::default();
        assert!(matches!(
            cn2_at_altitude(&p, -1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn cn2_decreasing_near_ground() {
        let p = TurbulenceProfile::<f64>::default();
        let mut last = cn2_at_altitude(&p, 0.0).unwrap();
        for h in 1..=1500 {
            let v = cn2_at_altitude(&p, h as f64).unwrap();
            assert!(v > 0.0 && v < last, "h = {h}");
            last = v;
        }
    }

    #[test]
    fn rho0_values() {
        assert!(rho0_horizontal(k800(), 1e4, 0.0).unwrap().is_infinite());
        let r = rho0_horizontal(k800(), 1e4, 1e-14).unwrap();
        // (0.545 * 1e-14 * k^2 * 1e4)^(-3/5) evaluated directly
        let direct = (0.545e-10 * k800() * k800()).powf(-0.6);
        assert!(rel(r, direct) < 1e-14);
        assert!(rel(r, 7.66e-3) < 1e-3);
        let c = |z: f64| rho0_horizontal(k800(), z, 1e-14).unwrap() * z.powf(0.6);
        assert!(rel(c(1e3), c(2e3)) < 1e-13 && rel(c(1e3), c(4e3)) < 1e-13);
    }

    #[test]
    fn rho0_rejects_bad_input() {
        assert!(rho0_horizontal(0.0, 1.0, 1e-14).is_err());
        assert!(rho0_horizontal(1.0, -1.0, 1e-14).is_err());
        assert!(rho0_horizontal(1.0, 1.0, -1e-14).is_err());
    }

    fn slant(kind: PathKind, profile: TurbulenceProfile<f64>) -> PathSpec<f64> {
        PathSpec::new(kind, PI / 3.0, 1e4, profile).unwrap()
    }

    #[test]
    fn zero_turbulence_gives_zero_coefficients() {
        let p = TurbulenceProfile::constant(0.0);
        let c = slant_coefficients(&slant(PathKind::SlantUp, p), k800()).unwrap();
        assert_eq!((c.a1, c.a2, c.a3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_profile_analytic() {
        let cn2 = 3e-15;
        let path = slant(PathKind::SlantUp, TurbulenceProfile::constant(cn2));
        let c = slant_coefficients(&path, k800()).unwrap();
        let h = path.altitude_span();
        let pre = 3.2796 * k800() * k800() * 0.01f64.powf(-1.0 / 3.0) / (PI / 3.0).cos();
        assert!(rel(c.a3, pre * cn2 * h / 3.0) < 1e-12);
        assert!(rel(c.a1, pre * cn2 * h / 3.0) < 1e-12);
        assert!(rel(c.a2, pre * cn2 * h / 3.0) < 1e-12);
    }

    /// Composite Simpson on a fixed grid, independent of the adaptive rule.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn reference_profile_matches_simpson() {
        let profile = TurbulenceProfile::default();
        for kind in [PathKind::SlantUp, PathKind::SlantDown] {
            let path = slant(kind, profile);
            let c = slant_coefficients(&path, k800()).unwrap();
            let h = path.altitude_span();
            let eta = |x: f64| {
                if kind == PathKind::SlantUp {
                    1.0 - x / h
                } else {
                    x / h
                }
            };
            let integral = simpson(
                |x| cn2_at_altitude(&profile, x).unwrap() * eta(x) * eta(x),
                0.0,
                h,
                100_000,
            );
            let pre = 3.2796 * k800() * k800() * 0.01f64.powf(-1.0 / 3.0) / (PI / 3.0).cos();
            assert!(rel(c.a3, pre * integral) < 1e-8, "{kind}");
        }
    }

    #[test]
    fn weight_completeness_and_direction_symmetry() {
        let profile = TurbulenceProfile::default();
        for zenith in [0.0, 0.5, 1.2, 1.55] {
            for distance in [500.0, 1e4, 3e4] {
                let up = PathSpec::new(PathKind::SlantUp, zenith, distance, profile).unwrap();
                let down = up.with_kind(PathKind::SlantDown);
                let cu = slant_coefficients(&up, k800()).unwrap();
                let cd = slant_coefficients(&down, k800()).unwrap();
                let h = up.altitude_span();
                let total = integrate(
                    |x: f64| cn2_at_altitude(&profile, x).unwrap(),
                    0.0,
                    h,
                    &AdaptiveSettings::default(),
                )
                .unwrap()
                .value;
                let pre = 3.2796 * k800() * k800() * 0.01f64.powf(-1.0 / 3.0) / zenith.cos();
                assert!(rel(cu.a1 + cu.a2 + cu.a3, pre * total) < 1e-8);
                assert!(rel(cd.a1 + cd.a2 + cd.a3, pre * total) < 1e-8);
                assert!(rel(cu.a3, cd.a1) < 1e-10);
                assert!(rel(cu.a1, cd.a3) < 1e-10);
                assert!(rel(cu.a2, cd.a2) < 1e-10);
            }
        }
    }

    #[test]
    fn coefficients_grow_with_ground_turbulence() {
        for kind in [PathKind::SlantUp, PathKind::SlantDown] {
            let mut last: Option<SlantCoefficients<f64>> = None;
            for cn2 in [0.0, 1e-16, 1e-15, 1e-14, 1e-13] {
                let path = slant(kind, TurbulenceProfile::default().with_cn2_ground(cn2));
                let c = slant_coefficients(&path, k800()).unwrap();
                assert!(c.a1 >= 0.0 && c.a2 >= 0.0 && c.a3 >= 0.0);
                if let Some(p) = last {
                    assert!(c.a1 > p.a1 && c.a2 > p.a2 && c.a3 > p.a3);
                }
                last = Some(c);
            }
        }
    }

    #[test]
    fn effective_inverse_rho2_by_kind() {
        let profile = TurbulenceProfile::default();
        let k = k800();
        let free = PathSpec::free_space(1e4);
        assert_eq!(effective_inverse_rho2(&free, k).unwrap(), 0.0);

        let hor = PathSpec::new(PathKind::Horizontal, 0.0, 1e4, profile).unwrap();
        let v = effective_inverse_rho2(&hor, k).unwrap();
        assert!(rel(v, 1.705e4) < 1e-3);

        let up = slant(PathKind::SlantUp, profile);
        assert_eq!(
            effective_inverse_rho2(&up, k).unwrap(),
            slant_coefficients(&up, k).unwrap().a3 / 2.0
        );
    }

    #[test]
    fn slant_coefficients_reject_other_kinds() {
        let hor =
            PathSpec::new(PathKind::Horizontal, 0.0, 1e4, TurbulenceProfile::default()).unwrap();
        assert!(slant_coefficients(&hor, k800()).is_err());
    }

    #[test]
    fn path_validation() {
        let p = TurbulenceProfile::<f64>::default();
        assert!(PathSpec::new(PathKind::SlantUp, PI / 2.0, 1e4, p).is_err());
        assert!(PathSpec::new(PathKind::Horizontal, 0.0, 0.0, p).is_err());
        assert!(PathSpec::new(PathKind::Horizontal, 3.0, 1e4, p).is_ok());
        assert!(TurbulenceProfile::new(1e-14, 2.1, 0.0, 0.0).is_err());
        assert!(TurbulenceProfile::new(-1e-14, 2.1, 0.01, 0.0).is_err());
    }

    #[test]
    fn path_kind_round_trip() {
        for k in PathKind::ALL {
            assert_eq!(k.as_str().parse::<PathKind>().unwrap(), k);
        }
        assert!("diagonal".parse::<PathKind>().is_err());
    }
}
