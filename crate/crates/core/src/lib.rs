//! Propagation of partially coherent Hermite-Gaussian beams through free
//! space and atmospheric turbulence, and the degree of polarization of the
//! received field.
//!
//! Every numeric module is generic over [`Real`] (`f32` or `f64`). The
//! crate root re-exports `f64` aliases of the main value types, which is what
//! the scenario runner and most callers want.

// `!(x > 0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod error;
pub mod oracle;
pub mod polarization;
pub mod quadrature;
pub mod scalar;
pub mod special_math;
pub mod turbulence;

pub use error::{Error, Result};
pub use num_complex;
pub use scalar::Real;

pub use beam::{intensity, MAX_BEAM_ORDER};
pub use oracle::{oracle_intensity, OracleSettings};
pub use polarization::{coherence_matrix, degree_of_polarization, polarization_profile, Component};
pub use turbulence::{effective_inverse_rho2, Cn2Model, PathKind};

pub type BeamParams = beam::BeamParams<f64>;
pub type CoherenceSpec = beam::CoherenceSpec<f64>;
pub type Observation = beam::Observation<f64>;
pub type PropagationConstants = beam::PropagationConstants<f64>;
pub type TurbulenceProfile = turbulence::TurbulenceProfile<f64>;
pub type PathSpec = turbulence::PathSpec<f64>;
pub type PolarizationSource = polarization::PolarizationSource<f64>;
pub type CoherenceMatrix2 = polarization::CoherenceMatrix2<f64>;
pub type PolarizationResult = polarization::PolarizationResult<f64>;
