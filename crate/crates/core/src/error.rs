use thiserror::Error;

/// Errors raised anywhere in the outage toolchain.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scene parameter violates its constraints.
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    /// Two communicating nodes sit on top of each other.
    #[error("degenerate geometry: {a} and {b} are {distance:e} m apart")]
    DegenerateGeometry {
        a: &'static str,
        b: &'static str,
        distance: f64,
    },

    /// Closed-form Laplace transforms only exist for a path-loss exponent of 2.
    #[error("closed-form analytics require alpha = 2, got alpha = {alpha}")]
    AnalyticDomain { alpha: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    /// Configuration document problem, tagged with the offending key.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("monte-carlo run needs at least one trial")]
    ZeroTrials,

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::ThreadPool(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
