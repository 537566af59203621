use thiserror::Error;

/// Errors produced by the models, the fitter and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the model.
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("fit failed at h' = {h_prime} m: {source}")]
    FitAtHeight {
        h_prime: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("singular fit: {0}")]
    Singular(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid curve: {0}")]
    Curve(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    /// True for failures of the numerical routines (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Fit(_) | Error::FitAtHeight { .. } | Error::Singular(_)
        )
    }
}
