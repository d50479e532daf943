use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The geometric-mean replacement needs both kernel evaluations of a
    /// tuple to share a sign; otherwise the shift Hamiltonian stops being
    /// Hermitian.
    #[error(
        "shift kernel changes sign within tuple (a={a}, b={b}, c={c}, delta={delta}): \
         lambda(w_ac)={lambda_ac:e}, lambda(w_bc)={lambda_bc:e}"
    )]
    SignCondition {
        a: usize,
        b: usize,
        c: usize,
        delta: i8,
        lambda_ac: f64,
        lambda_bc: f64,
    },

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("integration failed at t={t:e}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
