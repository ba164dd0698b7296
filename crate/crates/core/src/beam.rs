//! Partially coherent Hermite-Gaussian source and its propagated intensity.
//!
//! The received intensity at coincident points factorizes into one series
//! per Cartesian axis:
//!
//! ```text
//! I(ρ', z) = (k / 2z)^2 · w0^2 / (2a) · S_m(a, b_x, d) · S_n(a, b_y, d)
//! a = k^2 w0^2 / (8 z^2) + 1/ε^2,   d = k^2 w0^2 / (4 z^2) + 1/w0^2
//! b = i k ρ' / (2z),                1/ε^2 = 1/(2 w0^2) + 1/(2 σ0^2) + 1/ρ^2
//! ```
//!
//! With this prefactor a coherent-limit Gaussian source of unit peak
//! intensity propagates to `1/Δ(z)^2` on axis, and the result agrees with the
//! direct double integral in [`crate::oracle`] without any rescaling.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};
use crate::special_math::{binomial, factorial, hermite, LogSigned, Sign};
use crate::turbulence::{effective_inverse_rho2, PathSpec};

/// Largest mode order covered by the stability tests.
pub const MAX_BEAM_ORDER: usize = 20;

/// Relative imaginary residue tolerated in [`series_s`].
pub const SERIES_RESIDUE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams<T> {
    /// wavelength, m
    pub wavelength: T,
    /// Gaussian waist `w0`, m
    pub waist: T,
    /// Hermite order along x (`m`)
    pub order_x: usize,
    /// Hermite order along y (`n`)
    pub order_y: usize,
}

impl<T: Real> BeamParams<T> {
    pub fn new(wavelength: T, waist: T, order_x: usize, order_y: usize) -> Result<Self> {
        let b = Self {
            wavelength,
            waist,
            order_x,
            order_y,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > T::zero()) {
            return Err(Error::domain("wavelength", "must be > 0"));
        }
        if !(self.waist > T::zero()) {
            return Err(Error::domain("waist", "must be > 0"));
        }
        for order in [self.order_x, self.order_y] {
            if order > MAX_BEAM_ORDER {
                return Err(Error::UnsupportedOrder {
                    order,
                    max: MAX_BEAM_ORDER,
                });
            }
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> T {
        T::lit(2.0) * T::PI() / self.wavelength
    }

    pub fn with_orders(self, order_x: usize, order_y: usize) -> Self {
        Self {
            order_x,
            order_y,
            ..self
        }
    }
}

/// Gaussian Schell-model spatial coherence of the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSpec<T> {
    /// correlation length `σ0`, m
    pub sigma0: T,
}

impl<T: Real> CoherenceSpec<T> {
    pub fn new(sigma0: T) -> Result<Self> {
        if !(sigma0 > T::zero()) {
            return Err(Error::domain("sigma0", "must be > 0"));
        }
        Ok(Self { sigma0 })
    }
}

/// Point in the receiver plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<T> {
    pub rho_x: T,
    pub rho_y: T,
    pub z: T,
}

impl<T: Real> Observation<T> {
    pub fn new(rho_x: T, rho_y: T, z: T) -> Self {
        Self { rho_x, rho_y, z }
    }

    pub fn on_axis(z: T) -> Self {
        Self::new(T::zero(), T::zero(), z)
    }

    fn validate(&self) -> Result<()> {
        if !(self.z > T::zero()) {
            return Err(Error::domain("observation z", "must be > 0"));
        }
        if !(self.rho_x.is_finite() && self.rho_y.is_finite()) {
            return Err(Error::domain(
                "observation",
                "transverse position must be finite",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConstants<T> {
    pub a: T,
    pub b_x: Complex<T>,
    pub b_y: Complex<T>,
    pub d: T,
    /// `1/ε^2`
    pub eps_inv2: T,
}

impl<T: Real> PropagationConstants<T> {
    /// Builds the constants from an already evaluated turbulence term
    /// `1/ρ^2`, which lets callers share one slant-path integration across
    /// several correlation lengths.
    pub fn from_parts(
        beam: &BeamParams<T>,
        sigma0: T,
        inverse_rho2: T,
        obs: &Observation<T>,
    ) -> Result<Self> {
        beam.validate()?;
        obs.validate()?;
        if !(sigma0 > T::zero()) {
            return Err(Error::domain("sigma0", "must be > 0"));
        }
        if !(inverse_rho2 >= T::zero()) {
            return Err(Error::domain("inverse_rho2", "must be >= 0"));
        }
        let k = beam.wavenumber();
        let w0 = beam.waist;
        let two = T::lit(2.0);
        let diffraction = k * k * w0 * w0 / (T::lit(8.0) * obs.z * obs.z);
        let eps_inv2 =
            T::one() / (two * w0 * w0) + T::one() / (two * sigma0 * sigma0) + inverse_rho2;
        let b = |rho: T| Complex::new(T::zero(), k * rho / (two * obs.z));
        Ok(Self {
            a: diffraction + eps_inv2,
            b_x: b(obs.rho_x),
            b_y: b(obs.rho_y),
            d: two * diffraction + T::one() / (w0 * w0),
            eps_inv2,
        })
    }
}

/// Source field `H_m(√2 x/w0) H_n(√2 y/w0) exp(-(x^2+y^2)/w0^2)`.
pub fn source_field<T: Real>(beam: &BeamParams<T>, rho_x: T, rho_y: T) -> Result<T> {
    let s = T::SQRT_2() / beam.waist;
    let envelope = (-(rho_x * rho_x + rho_y * rho_y) / (beam.waist * beam.waist)).exp();
    Ok(hermite(beam.order_x, s * rho_x)? * hermite(beam.order_y, s * rho_y)? * envelope)
}

/// Spectral degree of coherence for separation `(dx, dy)`.
pub fn coherence_degree<T: Real>(spec: &CoherenceSpec<T>, dx: T, dy: T) -> T {
    (-(dx * dx + dy * dy) / (T::lit(2.0) * spec.sigma0 * spec.sigma0)).exp()
}

/// Cross-spectral density in the source plane.
pub fn source_csd<T: Real>(
    beam: &BeamParams<T>,
    spec: &CoherenceSpec<T>,
    rho1: [T; 2],
    rho2: [T; 2],
) -> Result<T> {
    Ok(source_field(beam, rho1[0], rho1[1])?
        * source_field(beam, rho2[0], rho2[1])?
        * coherence_degree(spec, rho1[0] - rho2[0], rho1[1] - rho2[1]))
}

/// Constants for a propagated observation; the turbulence term comes from
/// [`effective_inverse_rho2`] evaluated at `obs.z`.
pub fn propagation_constants<T: Real>(
    beam: &BeamParams<T>,
    spec: &CoherenceSpec<T>,
    path: &PathSpec<T>,
    obs: &Observation<T>,
) -> Result<PropagationConstants<T>> {
    obs.validate()?;
    let inverse_rho2 = effective_inverse_rho2(&path.with_distance(obs.z), beam.wavenumber())?;
    PropagationConstants::from_parts(beam, spec.sigma0, inverse_rho2, obs)
}

/// Per-axis series `S(order; a, b, d)`.
///
/// Evaluated as `2^m m! exp(b^2/a) Σ_l Σ_k T(l, k)` with
///
/// ```text
/// T(l,k) = (-1)^l C(m, l) d^l / l! · (2l)! / ((2l-2k)! k!) · b^(2(l-k)) · 4^(-k) · a^(k-2l)
/// ```
///
/// so that `b = 0` only keeps the `k = l` terms. Each term is assembled in
/// log form and the sum is compensated. For purely imaginary `b` the result
/// is real; a relative imaginary part above [`SERIES_RESIDUE_TOLERANCE`]
/// means the constants were built wrong and is reported as an error.
pub fn series_s<T: Real>(order: usize, a: T, b: Complex<T>, d: T) -> Result<T> {
    if order > MAX_BEAM_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_BEAM_ORDER,
        });
    }
    if !(a > T::zero()) {
        return Err(Error::domain("a", "must be > 0"));
    }
    if !(d >= T::zero()) {
        return Err(Error::domain("d", "must be >= 0"));
    }

    let b2 = b * b;
    let b2_norm = b2.norm();
    let (b2_log, b2_unit) = if b2_norm > T::zero() {
        (LogSigned::from_value(b2_norm), b2 / b2_norm)
    } else {
        (LogSigned::zero(), Complex::new(T::one(), T::zero()))
    };
    let a_log = LogSigned::from_value(a);
    let d_log = LogSigned::from_value(d);
    let quarter = LogSigned::from_value(T::lit(0.25));

    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for l in 0..=order {
        let outer = binomial::<T>(order, l)? * d_log.powi(l as i32) * factorial::<T>(2 * l)
            / factorial::<T>(l);
        let outer = if l % 2 == 1 { -outer } else { outer };
        for k in 0..=l {
            let j = l - k;
            if j > 0 && b2_log.is_zero() {
                continue;
            }
            let mag = outer / (factorial::<T>(2 * j) * factorial::<T>(k))
                * b2_log.powi(j as i32)
                * quarter.powi(k as i32)
                * a_log.powi(k as i32 - 2 * l as i32);
            let term = b2_unit.powu(j as u32) * mag.value();
            re.add(term.re);
            im.add(term.im);
        }
    }
    let sum = Complex::new(re.total(), im.total());

    let lead = (LogSigned::from_parts(T::LN_2() * T::from_usize_lossy(order), Sign::Positive)
        * factorial::<T>(order))
    .log_magnitude();
    let exponent = b2 / a;
    let scale = Complex::new(lead + exponent.re, exponent.im).exp();
    let s = sum * scale;

    if s.im.abs() > T::lit(SERIES_RESIDUE_TOLERANCE) * s.re.abs() {
        return Err(Error::ImaginaryResidue {
            what: "series_s",
            relative: (s.im.abs() / s.re.abs()).to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(s.re)
}

/// Received intensity from the precomputed constants.
pub fn intensity_from_constants<T: Real>(
    beam: &BeamParams<T>,
    z: T,
    c: &PropagationConstants<T>,
) -> Result<T> {
    let sx = series_s(beam.order_x, c.a, c.b_x, c.d)?;
    let sy = series_s(beam.order_y, c.a, c.b_y, c.d)?;
    let k = beam.wavenumber();
    let pre = k / (T::lit(2.0) * z);
    Ok(pre * pre * beam.waist * beam.waist / (T::lit(2.0) * c.a) * sx * sy)
}

/// Mean intensity at `obs` after propagating along `path` (arbitrary but
/// consistent units; a unit-peak coherent Gaussian source maps to `1/Δ^2`).
pub fn intensity<T: Real>(
    beam: &BeamParams<T>,
    spec: &CoherenceSpec<T>,
    path: &PathSpec<T>,
    obs: &Observation<T>,
) -> Result<T> {
    let c = propagation_constants(beam, spec, path, obs)?;
    intensity_from_constants(beam, obs.z, &c)
}
