use thiserror::Error;

/// Errors raised by the frame analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("invalid dilation factor {0}: must be positive")]
    InvalidDilation(f64),

    #[error("invalid segment ({lo}, {hi}]: {reason}")]
    InvalidSegment { lo: f64, hi: f64, reason: String },

    #[error("unbounded family: {0}")]
    UnboundedFamily(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("not a frame: lower bound vanishes on ({witness_lo}, {witness_hi}]")]
    NotAFrame { witness_lo: f64, witness_hi: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("ill-posed operator: {0}")]
    IllPosedOperator(String),

    #[error("grid does not cover ({lo}, {hi}]")]
    Coverage { lo: f64, hi: f64 },

    #[error("grid incompatible with family: {0}")]
    GridIncompatible(String),

    #[error("quadrature failed to converge on ({lo}, {hi}]")]
    QuadratureFailure { lo: f64, hi: f64 },

    #[error("sweep must be strictly increasing: {0}")]
    NonMonotoneSweep(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl FrameError {
    /// Stable machine-readable code, used by the CLI and the C interface.
    pub fn code(&self) -> &'static str {
        match self {
            FrameError::InvalidDilation(_) => "invalid-dilation",
            FrameError::InvalidSegment { .. } => "invalid-segment",
            FrameError::UnboundedFamily(_) => "unbounded-family",
            FrameError::HypothesisViolation(_) => "hypothesis-violation",
            FrameError::NotAFrame { .. } => "not-a-frame",
            FrameError::InvalidParams(_) => "invalid-params",
            FrameError::IllPosedOperator(_) => "ill-posed-operator",
            FrameError::Coverage { .. } => "coverage",
            FrameError::GridIncompatible(_) => "grid-incompatible",
            FrameError::QuadratureFailure { .. } => "quadrature-failure",
            FrameError::NonMonotoneSweep(_) => "non-monotone-sweep",
            FrameError::Linalg(_) => "linalg",
            FrameError::Config(_) => "config",
            FrameError::Io(_) => "io",
        }
    }

    /// Process exit status for the CLI.
    pub fn exit_status(&self) -> i32 {
        match self {
            FrameError::Config(_) => 2,
            FrameError::HypothesisViolation(_) | FrameError::InvalidParams(_) => 3,
            FrameError::NotAFrame { .. } => 4,
            FrameError::IllPosedOperator(_) => 5,
            FrameError::Io(_) => 6,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for FrameError {
    fn from(e: std::io::Error) -> Self {
        FrameError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FrameError>;
