//! Reference intensity by direct numerical integration.
//!
//! With mean and difference coordinates `u = (ρ1+ρ2)/2`, `v = ρ2-ρ1` the
//! propagation integral at coincident receiver points separates into one
//! double integral per Cartesian axis:
//!
//! ```text
//! F(ρ') = ∫∫ du dv exp(-2u²/w0²) exp(-v²/ε²) exp(i k (ρ'-u) v / z)
//!               · H_m(√2 (u - v/2)/w0) · H_m(√2 (u + v/2)/w0)
//! I(ρ', z) = (k / 2πz)² · F_x(ρ'_x) · F_y(ρ'_y)
//! ```
//!
//! Each `F` is computed with nested adaptive Gauss-Kronrod rules on a
//! truncated square. Nothing here touches the closed-form series, so the
//! two routes can check each other.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::beam::{BeamParams, CoherenceSpec, Observation};
use crate::error::{Error, Result};
use crate::polarization::{Component, PolarizationSource};
use crate::quadrature::{integrate, AdaptiveSettings, QuadValue};
use crate::scalar::Real;
use crate::special_math::hermite;
use crate::turbulence::{effective_inverse_rho2, PathSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings<T> {
    pub relative_tolerance: T,
    /// Half-width of the integration square in units of the Gaussian
    /// envelope width of each variable.
    pub truncation_radius: T,
    pub max_subdivision_depth: u32,
}

impl<T: Real> Default for OracleSettings<T> {
    fn default() -> Self {
        Self {
            relative_tolerance: T::lit(1e-9),
            truncation_radius: T::lit(8.0),
            max_subdivision_depth: 40,
        }
    }
}

impl<T: Real> OracleSettings<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > T::zero() && self.relative_tolerance <= T::lit(1e-3)) {
            return Err(Error::domain("relative_tolerance", "must lie in (0, 1e-3]"));
        }
        if !(self.truncation_radius >= T::lit(5.0)) {
            return Err(Error::domain("truncation_radius", "must be >= 5"));
        }
        Ok(())
    }
}

/// Result with its (conservative) absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate<T> {
    pub value: T,
    pub error: T,
}

/// Inner integral carried through the outer rule together with its error,
/// so the outer pass also integrates the inner error budget.
#[derive(Debug, Clone, Copy)]
struct WithError<T> {
    value: Complex<T>,
    error: T,
}

impl<T: Real> Add for WithError<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

impl<T: Real> Sub for WithError<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            value: self.value - o.value,
            error: self.error - o.error,
        }
    }
}

impl<T: Real> Mul<T> for WithError<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self {
            value: self.value * s,
            error: self.error * s,
        }
    }
}

impl<T: Real> QuadValue<T> for WithError<T> {
    fn zero() -> Self {
        Self {
            value: Complex::new(T::zero(), T::zero()),
            error: T::zero(),
        }
    }

    fn magnitude(&self) -> T {
        self.value.norm()
    }
}

struct AxisIntegrand<T> {
    order: usize,
    w0: T,
    eps_inv2: T,
    k_over_z: T,
    rho_prime: T,
    u_half: T,
    v_half: T,
}

impl<T: Real> AxisIntegrand<T> {
    fn at(&self, u: T, v: T) -> Complex<T> {
        let half = T::lit(0.5);
        let s = T::SQRT_2() / self.w0;
        let envelope = (-T::lit(2.0) * u * u / (self.w0 * self.w0) - v * v * self.eps_inv2).exp();
        // order is validated before integration starts
        let h1 = hermite(self.order, s * (u - half * v)).unwrap_or(T::nan());
        let h2 = hermite(self.order, s * (u + half * v)).unwrap_or(T::nan());
        let phase = self.k_over_z * (self.rho_prime - u) * v;
        Complex::new(phase.cos(), phase.sin()) * (envelope * h1 * h2)
    }

    /// `∫∫ |integrand|`, free of cancellation, used to set absolute targets.
    fn absolute_scale(&self, depth: u32) -> Result<T> {
        let settings = AdaptiveSettings {
            rel_tol: T::lit(1e-6),
            abs_tol: T::zero(),
            max_depth: depth,
            max_intervals: 20_000,
        };
        let mut inner_failure = None;
        let outer = integrate(
            |u: T| match integrate(
                |v: T| self.at(u, v).norm(),
                -self.v_half,
                self.v_half,
                &settings,
            ) {
                Ok(e) => e.value,
                Err(err) => {
                    inner_failure.get_or_insert(err);
                    T::zero()
                }
            },
            -self.u_half,
            self.u_half,
            &settings,
        )?;
        match inner_failure {
            Some(err) => Err(err),
            None => Ok(outer.value),
        }
    }

    fn integrate(&self, rel_tol: T, abs_tol: T, depth: u32) -> Result<(Complex<T>, T)> {
        let v_settings = AdaptiveSettings {
            rel_tol: T::zero(),
            abs_tol: abs_tol / (T::lit(20.0) * self.u_half),
            max_depth: depth,
            max_intervals: 20_000,
        };
        let u_settings = AdaptiveSettings {
            rel_tol,
            abs_tol: abs_tol * T::lit(0.5),
            max_depth: depth,
            max_intervals: 20_000,
        };
        let mut inner_failure = None;
        let outer = integrate(
            |u: T| match integrate(|v: T| self.at(u, v), -self.v_half, self.v_half, &v_settings) {
                Ok(e) => WithError {
                    value: e.value,
                    error: e.error,
                },
                Err(err) => {
                    inner_failure.get_or_insert(err);
                    WithError::zero()
                }
            },
            -self.u_half,
            self.u_half,
            &u_settings,
        )?;
        if let Some(err) = inner_failure {
            return Err(err);
        }
        Ok((outer.value.value, outer.error + outer.value.error))
    }
}

fn non_convergence(e: Error) -> Error {
    match e {
        Error::NonConvergence {
            estimate, error, ..
        } => Error::NonConvergence {
            what: "oracle axis factor",
            estimate,
            error,
        },
        other => other,
    }
}

/// One Cartesian factor `F(ρ')` of the propagated intensity.
#[allow(clippy::too_many_arguments)]
pub fn oracle_axis_factor<T: Real>(
    order: usize,
    w0: T,
    eps_inv2: T,
    wavenumber: T,
    z: T,
    rho_prime: T,
    settings: &OracleSettings<T>,
) -> Result<OracleEstimate<T>> {
    settings.validate()?;
    hermite(order, T::zero())?;
    if !(z > T::zero()) {
        return Err(Error::domain("z", "must be > 0"));
    }
    if !(w0 > T::zero() && eps_inv2 > T::zero() && wavenumber > T::zero()) {
        return Err(Error::domain("oracle", "w0, 1/eps^2 and k must be > 0"));
    }
    let integrand = AxisIntegrand {
        order,
        w0,
        eps_inv2,
        k_over_z: wavenumber / z,
        rho_prime,
        u_half: settings.truncation_radius * w0 / T::lit(2.0).sqrt(),
        v_half: settings.truncation_radius / eps_inv2.sqrt(),
    };
    let depth = settings.max_subdivision_depth;

    // Absolute targets come from the cancellation-free scale, so inner
    // integrals that nearly vanish by oscillation are not held to a
    // relative target they cannot reach.
    let scale = integrand.absolute_scale(depth).map_err(non_convergence)?;
    let abs_tol = settings.relative_tolerance * scale * T::lit(0.01);
    let (value, error) = integrand
        .integrate(settings.relative_tolerance, abs_tol, depth)
        .map_err(non_convergence)?;

    if value.im.abs() > settings.relative_tolerance * value.re.abs() + error {
        return Err(Error::ImaginaryResidue {
            what: "oracle axis factor",
            relative: (value.im.abs() / value.re.abs())
                .to_f64()
                .unwrap_or(f64::INFINITY),
        });
    }
    Ok(OracleEstimate {
        value: value.re,
        error,
    })
}

fn oracle_intensity_with<T: Real>(
    beam: &BeamParams<T>,
    sigma0: T,
    inverse_rho2: T,
    obs: &Observation<T>,
    settings: &OracleSettings<T>,
) -> Result<OracleEstimate<T>> {
    beam.validate()?;
    let two = T::lit(2.0);
    let w0 = beam.waist;
    let eps_inv2 = T::one() / (two * w0 * w0) + T::one() / (two * sigma0 * sigma0) + inverse_rho2;
    let k = beam.wavenumber();
    let fx = oracle_axis_factor(beam.order_x, w0, eps_inv2, k, obs.z, obs.rho_x, settings)?;
    let fy = oracle_axis_factor(beam.order_y, w0, eps_inv2, k, obs.z, obs.rho_y, settings)?;
    let pre = k / (two * T::PI() * obs.z);
    let pre = pre * pre;
    let value = pre * fx.value * fy.value;
    let error = pre * (fx.error * fy.value.abs() + fy.error * fx.value.abs() + fx.error * fy.error);
    Ok(OracleEstimate { value, error })
}

/// Intensity at `obs` by direct integration.
pub fn oracle_intensity<T: Real>(
    beam: &BeamParams<T>,
    spec: &CoherenceSpec<T>,
    path: &PathSpec<T>,
    obs: &Observation<T>,
    settings: &OracleSettings<T>,
) -> Result<OracleEstimate<T>> {
    if !(obs.z > T::zero()) {
        return Err(Error::domain("observation z", "must be > 0"));
    }
    let inverse_rho2 = effective_inverse_rho2(&path.with_distance(obs.z), beam.wavenumber())?;
    oracle_intensity_with(beam, spec.sigma0, inverse_rho2, obs, settings)
}

/// Coherence-matrix element by direct integration: the scalar intensity
/// with `σ0 → σ_0ij`, scaled by `γ_ij`.
pub fn oracle_csd_element<T: Real>(
    component: Component,
    beam: &BeamParams<T>,
    source: &PolarizationSource<T>,
    path: &PathSpec<T>,
    obs: &Observation<T>,
    settings: &OracleSettings<T>,
) -> Result<Complex<T>> {
    let (gamma, sigma) = match component {
        Component::XX => (Complex::new(source.gamma_xx, T::zero()), source.sigma0_xx),
        Component::YY => (Complex::new(source.gamma_yy, T::zero()), source.sigma0_yy),
        Component::XY => (source.gamma_xy, source.sigma0_xy),
        Component::YX => (source.gamma_xy.conj(), source.sigma0_xy),
    };
    let spec = CoherenceSpec::new(sigma)?;
    Ok(gamma * oracle_intensity(beam, &spec, path, obs, settings)?.value)
}
