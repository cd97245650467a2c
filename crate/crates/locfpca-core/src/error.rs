use thiserror::Error;

/// Errors surfaced by the numeric layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix not symmetric at ({i},{j}): deviation {dev:e}")]
    NotSymmetric { i: usize, j: usize, dev: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps, off-diagonal residual {residual:e}")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigenvalue {index} is degenerate: gap {gap:e} below tolerance {tol:e}")]
    DegenerateEigenvalue { index: usize, gap: f64, tol: f64 },

    #[error("invalid parameter `{name}`: {why}")]
    InvalidParam { name: &'static str, why: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("density not twice differentiable at x={x}")]
    NonDifferentiable { x: f64 },

    #[error("density vanishes at shift coordinate {index}")]
    ZeroDensity { index: usize },

    #[error("truncation too short: tail bound {bound:e} exceeds {required:e} (need k_max >= {k_needed})")]
    TailTooHeavy { bound: f64, required: f64, k_needed: usize },

    #[error("sample is empty or too small: need at least {need}")]
    SampleTooSmall { need: usize },

    #[error("quadrature method limited to dimension {max}, got {got}")]
    QuadratureDim { max: usize, got: usize },
}

impl Error {
    pub fn invalid(name: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidParam { name, why: why.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
