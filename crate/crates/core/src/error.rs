use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("beam speed must be non-zero for the beam to traverse the window")]
    ZeroSpeed,

    #[error("classical integration diverged at step {step} (t = {t})")]
    IntegrationDiverged { step: usize, t: f64 },

    #[error("trajectory does not span the interaction window: f/peak = {residual:e} at an endpoint")]
    TruncatedTrajectory { residual: f64 },

    #[error("not enough post-passage samples to extract an amplitude ({0})")]
    AmplitudeFit(String),

    #[error("adaptive quadrature did not converge: estimated error {achieved:e} > tolerance {tolerance:e}")]
    QuadratureNotConverged { achieved: f64, tolerance: f64 },

    #[error("first-order probability {p1} exceeds 1: model is outside the perturbative regime")]
    ModelOutOfRegime { p1: f64 },

    #[error("first-order probability {p1} violates the perturbative bound {bound}")]
    PerturbationRegime { p1: f64, bound: f64 },

    #[error("inelastic channel closed: k0^2 = {k0_sq} below threshold 2*m*omega0/hbar = {threshold}")]
    ChannelClosed { k0_sq: f64, threshold: f64 },

    #[error("grid half-width {half_width} is narrower than {required} (8 sigma_y)")]
    GridTooNarrow { half_width: f64, required: f64 },

    #[error("norm drift {drift:e} at step {step} (t = {t}) exceeds stability bound")]
    StabilityFailure { step: usize, t: f64, drift: f64 },

    #[error("history needs at least 3 samples, got {0}")]
    InsufficientSamples(usize),

    #[error("incompatible grids")]
    GridMismatch,

    #[error("wavenumber {value} is not an allowed outcome (k0 = {k0}, k1 = {k1})")]
    InvalidOutcome { value: f64, k0: f64, k1: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// Configuration and validation problems map to exit code 1, everything
    /// else is a numerical or I/O failure (exit code 2).
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::Config(_) | Error::ZeroSpeed)
    }
}
