use thiserror::Error;

/// Errors raised while constructing profiles, barriers, fields and audits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested value lies outside the attainable range of a monotone map.
    #[error("range error: {0}")]
    Range(String),

    /// A parameter violates a precondition (for example `c <= c_u` or `kappa >= 0`).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Shooting or integration could not produce the requested curve.
    #[error("construction error: {0}")]
    Construction(String),

    /// The derivative of a barrier stopped being positive.
    #[error("monotonicity lost at z = {z}: phi' = {slope}")]
    Monotonicity { z: f64, slope: f64 },

    /// The warp does not have a strictly increasing logarithmic derivative.
    #[error("invalid warp: (rho'/rho)' = {value} <= 0 at z = {z}")]
    InvalidWarp { z: f64, value: f64 },

    /// A Minkowski norm is degenerate or non-convex in some direction.
    #[error("convexity error: {0}")]
    Convexity(String),

    /// An iterative solver exhausted its budget.
    #[error("no convergence after {iterations} iterations (last residual {last_residual:e})")]
    Convergence {
        iterations: usize,
        last_residual: f64,
        history: Vec<f64>,
    },

    /// The quasilinear operator lost ellipticity on the encountered gradients.
    #[error("ellipticity lost: {0}")]
    Ellipticity(String),

    /// A field was offered to a verifier without a certified residual.
    #[error("uncertified field: residual {residual:e} above tolerance {tolerance:e}")]
    Uncertified { residual: f64, tolerance: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
