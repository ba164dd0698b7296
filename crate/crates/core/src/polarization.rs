//! 2×2 coherence matrix of the electromagnetic beam and its degree of
//! polarization at coincident receiver points.
//!
//! Each element `W_ij` is the scalar intensity formula evaluated with its own
//! correlation length `σ_0ij` and scaled by `γ_ij`. Only the upper triangle
//! is stored; `W_yx = conj(W_xy)`.

use num_complex::Complex;

use crate::beam::{intensity_from_constants, BeamParams, Observation, PropagationConstants};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::turbulence::{effective_inverse_rho2, PathSpec};

/// Negative determinants down to `-DET_FLOOR · trace^2` are treated as
/// roundoff.
pub const DET_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationSource<T> {
    pub gamma_xx: T,
    pub gamma_yy: T,
    pub gamma_xy: Complex<T>,
    pub sigma0_xx: T,
    pub sigma0_yy: T,
    pub sigma0_xy: T,
}

impl<T: Real> PolarizationSource<T> {
    pub fn new(
        gamma_xx: T,
        gamma_yy: T,
        gamma_xy: Complex<T>,
        sigma0_xx: T,
        sigma0_yy: T,
        sigma0_xy: T,
    ) -> Result<Self> {
        let s = Self {
            gamma_xx,
            gamma_yy,
            gamma_xy,
            sigma0_xx,
            sigma0_yy,
            sigma0_xy,
        };
        s.validate()?;
        Ok(s)
    }

    /// γ_xx = γ_yy = 0.5, γ_xy = 0.1, σ_0xx = σ_0yy = 1 cm, σ_0xy = 2 cm.
    pub fn reference() -> Self {
        Self {
            gamma_xx: T::lit(0.5),
            gamma_yy: T::lit(0.5),
            gamma_xy: Complex::new(T::lit(0.1), T::zero()),
            sigma0_xx: T::lit(0.01),
            sigma0_yy: T::lit(0.01),
            sigma0_xy: T::lit(0.02),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |g: T| g >= T::zero() && g <= T::one();
        if !unit(self.gamma_xx) || !unit(self.gamma_yy) {
            return Err(Error::domain(
                "gamma",
                "gamma_xx and gamma_yy must lie in [0, 1]",
            ));
        }
        let cross = self.gamma_xy.norm_sqr();
        if !(cross <= T::one()) {
            return Err(Error::domain("gamma_xy", "|gamma_xy| must not exceed 1"));
        }
        if !(cross <= self.gamma_xx * self.gamma_yy) {
            return Err(Error::domain(
                "gamma_xy",
                format!(
                    "not realizable: |gamma_xy|^2 = {} exceeds gamma_xx * gamma_yy = {}",
                    cross,
                    self.gamma_xx * self.gamma_yy
                ),
            ));
        }
        for (name, s) in [
            ("sigma0_xx", self.sigma0_xx),
            ("sigma0_yy", self.sigma0_yy),
            ("sigma0_xy", self.sigma0_xy),
        ] {
            if !(s > T::zero()) {
                return Err(Error::domain(name, "must be > 0"));
            }
        }
        Ok(())
    }

    /// Multiplies all three correlation lengths by `factor`.
    pub fn with_sigma_scale(self, factor: T) -> Self {
        Self {
            sigma0_xx: self.sigma0_xx * factor,
            sigma0_yy: self.sigma0_yy * factor,
            sigma0_xy: self.sigma0_xy * factor,
            ..self
        }
    }

    /// Multiplies all correlation coefficients by `factor`.
    pub fn with_gamma_scale(self, factor: T) -> Self {
        Self {
            gamma_xx: self.gamma_xx * factor,
            gamma_yy: self.gamma_yy * factor,
            gamma_xy: self.gamma_xy * factor,
            ..self
        }
    }

    fn element(&self, c: Component) -> (Complex<T>, T) {
        match c {
            Component::XX => (Complex::new(self.gamma_xx, T::zero()), self.sigma0_xx),
            Component::YY => (Complex::new(self.gamma_yy, T::zero()), self.sigma0_yy),
            Component::XY => (self.gamma_xy, self.sigma0_xy),
            Component::YX => (self.gamma_xy.conj(), self.sigma0_xy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    XX,
    YY,
    XY,
    YX,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceMatrix2<T> {
    pub w_xx: T,
    pub w_yy: T,
    pub w_xy: Complex<T>,
}

impl<T: Real> CoherenceMatrix2<T> {
    pub fn new(w_xx: T, w_yy: T, w_xy: Complex<T>) -> Self {
        Self { w_xx, w_yy, w_xy }
    }

    pub fn w_yx(&self) -> Complex<T> {
        self.w_xy.conj()
    }

    pub fn trace(&self) -> T {
        self.w_xx + self.w_yy
    }

    pub fn determinant(&self) -> T {
        self.w_xx * self.w_yy - self.w_xy.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationResult<T> {
    pub observation: Observation<T>,
    pub matrix: CoherenceMatrix2<T>,
    pub dop: T,
    /// trace normalized by the largest trace among the evaluated points
    pub normalized_intensity: T,
}

fn element_with<T: Real>(
    c: Component,
    beam: &BeamParams<T>,
    source: &PolarizationSource<T>,
    inverse_rho2: T,
    obs: &Observation<T>,
) -> Result<Complex<T>> {
    let (gamma, sigma) = source.element(c);
    let constants = PropagationConstants::from_parts(beam, sigma, inverse_rho2, obs)?;
    Ok(gamma * intensity_from_constants(beam, obs.z, &constants)?)
}

/// One element `W_ij(ρ', ρ', z)` of the propagated coherence matrix.
pub fn csd_element<T: Real>(
    component: Component,
    beam: &BeamParams<T>,
    source: &PolarizationSource<T>,
    path: &PathSpec<T>,
    obs: &Observation<T>,
) -> Result<Complex<T>> {
    let inverse_rho2 = effective_inverse_rho2(&path.with_distance(obs.z), beam.wavenumber())?;
    element_with(component, beam, source, inverse_rho2, obs)
}

/// Coherence matrix for a known turbulence term `1/ρ^2`.
pub fn coherence_matrix_with<T: Real>(
    beam: &BeamParams<T>,
    source: &PolarizationSource<T>,
    inverse_rho2: T,
    obs: &Observation<T>,
) -> Result<CoherenceMatrix2<T>> {
    Ok(CoherenceMatrix2 {
        w_xx: element_with(Component::XX, beam, source, inverse_rho2, obs)?.re,
        w_yy: element_with(Component::YY, beam, source, inverse_rho2, obs)?.re,
        w_xy: element_with(Component::XY, beam, source, inverse_rho2, obs)?,
    })
}

pub fn coherence_matrix<T: Real>(
    beam: &BeamParams<T>,
    source: &PolarizationSource<T>,
    path: &PathSpec<T>,
    obs: &Observation<T>,
) -> Result<CoherenceMatrix2<T>> {
    let inverse_rho2 = effective_inverse_rho2(&path.with_distance(obs.z), beam.wavenumber())?;
    coherence_matrix_with(beam, source, inverse_rho2, obs)
}

/// `P = sqrt(1 - 4 det W / (tr W)^2)`.
pub fn degree_of_polarization<T: Real>(matrix: &CoherenceMatrix2<T>) -> Result<T> {
    let trace = matrix.trace();
    if !(trace > T::zero()) {
        return Err(Error::DegenerateMatrix {
            trace: trace.to_f64().unwrap_or(f64::NAN),
        });
    }
    let det = matrix.determinant();
    let floor = -T::lit(DET_FLOOR) * trace * trace;
    if det < floor {
        return Err(Error::Unrealizable {
            det: det.to_f64().unwrap_or(f64::NAN),
            floor: floor.to_f64().unwrap_or(f64::NAN),
        });
    }
    let det = det.max(T::zero());
    let radicand = (T::one() - T::lit(4.0) * det / (trace * trace)).max(T::zero());
    Ok(radicand.sqrt().min(T::one()))
}

/// Degree of polarization in the source plane. The common field factor
/// cancels at coincident points, leaving only the γ matrix.
pub fn source_dop<T: Real>(source: &PolarizationSource<T>) -> Result<T> {
    let m = CoherenceMatrix2::new(source.gamma_xx, source.gamma_yy, source.gamma_xy);
    degree_of_polarization(&m)
}

/// Evaluates `P` and the normalized trace at each observation. All points
/// share one turbulence evaluation per distinct `z`.
pub fn polarization_profile<T: Real>(
    beam: &BeamParams<T>,
    source: &PolarizationSource<T>,
    path: &PathSpec<T>,
    points: &[Observation<T>],
) -> Result<Vec<PolarizationResult<T>>> {
    let mut cached: Option<(T, T)> = None;
    let mut out = Vec::with_capacity(points.len());
    for obs in points {
        let inverse_rho2 = match cached {
            Some((z, v)) if z == obs.z => v,
            _ => {
                let v = effective_inverse_rho2(&path.with_distance(obs.z), beam.wavenumber())?;
                cached = Some((obs.z, v));
                v
            }
        };
        let matrix = coherence_matrix_with(beam, source, inverse_rho2, obs)?;
        out.push(PolarizationResult {
            observation: *obs,
            dop: degree_of_polarization(&matrix)?,
            matrix,
            normalized_intensity: T::zero(),
        });
    }
    let max = out.iter().map(|r| r.matrix.trace()).fold(T::zero(), T::max);
    if max > T::zero() {
        for r in &mut out {
            r.normalized_intensity = r.matrix.trace() / max;
        }
    }
    Ok(out)
}
