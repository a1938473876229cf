use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments or parameters outside the admissible space.
    #[error("domain error: {0}")]
    Domain(String),

    /// Every particle weight vanished at time index `t`.
    #[error("particle system degenerated at time index {t}: all weights are zero")]
    Degenerate { t: usize },

    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
