use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A residual coefficient on a diagonal lattice point (M, ν, ν) did not vanish.
    #[error("diagonal obstruction at order {order}, nu = mu = {index}: residual {value}")]
    DiagonalObstruction {
        order: usize,
        index: usize,
        value: String,
    },

    #[error("truncated dispersion sum is {value} <= 0 at eps = {eps}")]
    NegativeOmegaSquared { eps: f64, value: f64 },

    #[error("eps = {eps} outside the guarded range [0, 1)")]
    EpsilonOutOfRange { eps: f64 },

    #[error("hyperbolicity violated at lambda = {lambda}: margin {margin}")]
    HyperbolicityViolation { lambda: f64, margin: f64 },

    #[error("initial data fails the standing-wave symmetry check: {0}")]
    SymmetryViolation(String),

    #[error("quadrature error estimate {estimate:e} above tolerance {tolerance:e} after {panels} panels")]
    QuadratureNotConverged {
        estimate: f64,
        tolerance: f64,
        panels: usize,
    },

    #[error("inversion of (x, t) = ({x}, {t}) did not converge: residual {residual:e}")]
    InversionNotConverged { x: f64, t: f64, residual: f64 },

    #[error("fixed-point iteration did not converge after {iterations} steps")]
    NotConverged { iterations: usize },

    #[error("field sample lacks the derivatives needed for {0}")]
    MissingDerivatives(&'static str),

    #[error("series contains an odd power of omega; cannot substitute omega^2")]
    OddOmegaPower,
}

impl Error {
    /// Stable variant name, used in machine-readable diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::DiagonalObstruction { .. } => "DiagonalObstruction",
            Error::NegativeOmegaSquared { .. } => "NegativeOmegaSquared",
            Error::EpsilonOutOfRange { .. } => "EpsilonOutOfRange",
            Error::HyperbolicityViolation { .. } => "HyperbolicityViolation",
            Error::SymmetryViolation(_) => "SymmetryViolation",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::InversionNotConverged { .. } => "InversionNotConverged",
            Error::NotConverged { .. } => "NotConverged",
            Error::MissingDerivatives(_) => "MissingDerivatives",
            Error::OddOmegaPower => "OddOmegaPower",
        }
    }
}
