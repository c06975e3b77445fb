use thiserror::Error;

/// Error taxonomy shared by every module.
///
/// `Config` and `UnknownKey` indicate bad user input (the CLI maps them to
/// exit code 2); the remaining variants are runtime failures (exit code 3).
#[derive(Debug, Error)]
pub enum CoreError {
    /// Invalid configuration value (named field, offending value in message).
    #[error("config: {0}")]
    Config(String),

    /// Unknown key in a config file.
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },

    /// Dimension guard tripped (e.g. channel-count enumeration bound).
    #[error("dimension guard: {0}")]
    Guard(String),

    /// The admissible energy window is empty for this configuration.
    #[error("empty energy window: delta0 = {delta0:.6} >= d/l = {ratio:.6}")]
    EmptyWindow { delta0: f64, ratio: f64 },

    /// Mesh too coarse for the requested quadrature / propagation.
    #[error("resolution: {0}")]
    Resolution(String),

    /// Numerical failure (non-convergence, singular factorization, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CoreError {
    /// True for errors caused by user input rather than runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, CoreError::Config(_) | CoreError::UnknownKey { .. })
    }
}
