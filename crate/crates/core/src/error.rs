use thiserror::Error;

/// Errors produced by the simulation, theory and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument `{name}` = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("singular hitting-time system: {0}")]
    Singular(String),

    #[error("objective is not unimodal on [{lo}, {hi}]: {sign_changes} gradient sign changes")]
    NotUnimodal { lo: f64, hi: f64, sign_changes: usize },

    #[error("maximum lies on the bracket boundary at {0}")]
    BoundaryMaximum(f64),

    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::InvalidArgument {
            name,
            value: value.to_string(),
            reason,
        }
    }

    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::InvalidArgument { .. } => "invalid_argument",
            Error::InvalidLadder(_) => "invalid_ladder",
            Error::Singular(_) => "singular",
            Error::NotUnimodal { .. } => "not_unimodal",
            Error::BoundaryMaximum(_) => "boundary_maximum",
            Error::Quadrature(_) => "quadrature",
            Error::Malformed(_) => "malformed_input",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
