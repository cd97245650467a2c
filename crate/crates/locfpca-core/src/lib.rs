//! Local covariance operators of Hilbert-valued random elements.
//!
//! Finite-truncation numerics for local functional PCA: covariance and local
//! covariance estimators, small-ball probability asymptotics, de Haan
//! class-Gamma machinery, and the quadrature oracles used to verify the
//! asymptotic statements at desk scale.
//!
//! Data-parallel loops run through rayon when the `parallel` feature is
//! enabled (default) and fall back to sequential execution otherwise; both
//! modes produce bit-identical results.

pub mod error;
pub mod exec;
pub mod gamma;
pub mod hilbert;
pub mod kernel;
pub mod localcov;
pub mod model;
pub mod oracles;
pub mod quad;
pub mod smallball;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
