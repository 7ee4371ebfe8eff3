use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Zero momentum is not a photon state.
    #[error("wavevector must be nonzero")]
    ZeroWavevector,

    #[error("direction is not a unit vector (|n| = {norm})")]
    NotUnitVector { norm: f64 },

    /// An exact algebraic identity failed. This indicates a construction bug.
    #[error("algebra identity `{0}` violated")]
    IdentityViolation(String),

    #[error("mode weight must be positive and finite, got {0}")]
    InvalidWeight(f64),

    #[error("mode with k = {k:?} is outside the representable band of the grid")]
    OffGridMode { k: [f64; 3] },

    #[error("grid spec invalid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field is not transverse (relative residual {residual:e})")]
    NotTransverse { residual: f64 },

    #[error("relativistic condition violated (relative residual {residual:e})")]
    ConstraintViolated { residual: f64 },

    #[error("orbital angular momentum from upper and lower parts disagree by {discrepancy:e}")]
    GridTooCoarse { discrepancy: f64 },

    #[error("oscillatory quadrature did not converge (last change {change:e})")]
    QuadratureFailure { change: f64 },

    #[error("boost velocity must satisfy |beta| < 1, got {0}")]
    InvalidBeta(f64),

    #[error("wavevector is off the light cone (|omega - c|k|| / omega = {residual:e})")]
    OffLightCone { residual: f64 },

    #[error("field file: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
