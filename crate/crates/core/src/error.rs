use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("power fraction {alpha} outside {expected}")]
    InvalidAlpha { alpha: f64, expected: &'static str },

    #[error("quadrature did not converge on [{a}, {b}] within depth {max_depth}")]
    NonConvergence { a: f64, b: f64, max_depth: u32 },

    /// The secondary user is not admitted (γ_s = 0), so quantities that
    /// assume an interfering secondary are undefined.
    #[error("no secondary access: {0}")]
    NoSecondaryAccess(&'static str),

    #[error("primary constraint cannot be met: {0}")]
    Infeasible(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
