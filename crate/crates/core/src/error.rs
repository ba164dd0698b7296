use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial order {order} exceeds supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("gaussian moment diverges for p = {p} (need p > 0)")]
    DivergentIntegral { p: f64 },

    #[error("{what}: quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("{what}: imaginary residue {relative:e} exceeds tolerance")]
    ImaginaryResidue { what: &'static str, relative: f64 },

    #[error("coherence matrix is degenerate (trace {trace:e})")]
    DegenerateMatrix { trace: f64 },

    #[error("coherence matrix not realizable (det {det:e} below floor {floor:e})")]
    Unrealizable { det: f64, floor: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
