//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("gamma pole at z = {re} + {im}i")]
    GammaPole { re: f64, im: f64 },

    #[error("dense operator cap exceeded: n = {n} > cap = {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("point lies on the spectrum (separation {dist:.3e})")]
    OnSpectrum { dist: f64 },

    #[error("point is off the spectrum segment (transverse deviation {dev:.3e})")]
    OffSegment { dev: f64 },

    #[error("matrix numerically singular (|det| = {det:.3e})")]
    SingularMatrix { det: f64 },

    #[error("iteration did not converge after {iters} steps (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
