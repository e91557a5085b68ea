use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("group not finite within cap of {cap} elements")]
    NotFiniteWithinCap { cap: usize },

    #[error("connection is not flat: commutator residual {residual:e}")]
    NotFlat { residual: f64 },

    #[error("detour radius too large: arc approaches hyperplane H_{hyperplane}")]
    EpsTooLarge { hyperplane: usize },

    #[error("integration failed at t = {t} on segment {segment}: {reason}")]
    Integration { segment: usize, t: f64, reason: String },

    #[error("spectrum of T(sigma_{generator}) does not match the expected eigenvalues (deviation {deviation:e}); check loop orientation")]
    SpectrumMismatch { generator: usize, deviation: f64 },

    #[error("braid relation residual {residual:e} exceeds {threshold:e}; integration not accurate enough")]
    BraidResidual { residual: f64, threshold: f64 },

    #[error("projector e_{generator} not rank 1 (sigma2/sigma1 = {ratio:e}, |tau| = {tau_abs:e})")]
    ProjectorRank { generator: usize, ratio: f64, tau_abs: f64 },

    #[error("rewriting did not terminate within {cap} steps")]
    RewriteCap { cap: usize },

    #[error("spanning set not closed: product of basis words {a} and {b} escapes the span")]
    NotClosed { a: usize, b: usize },

    #[error("identity {name} fails with residual {residual:e}")]
    IdentityFailed { name: String, residual: f64 },

    #[error("rejection sampling exhausted after {0} draws")]
    SamplingExhausted(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
