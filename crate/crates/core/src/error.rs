use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the operation (zero vector,
    /// mismatched dimension, empty list, out-of-range parameter).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid anisotropy: {0}")]
    InvalidAnisotropy(String),

    #[error("grid error at node {node}: {reason}")]
    Grid { node: usize, reason: String },

    /// A standing assumption of the problem (A1–A4, the γ-condition) does
    /// not hold for the supplied data.
    #[error("assumption {name} failed: {detail}")]
    Assumption { name: &'static str, detail: String },

    #[error("blow-up at node {node} (x = {x:.6}, y = {y:.6}) at t = {t:.6e}")]
    BlowUp { node: usize, x: f64, y: f64, t: f64 },

    #[error("solver configuration: {0}")]
    Config(String),

    #[error("initial data incompatible with boundary condition: mismatch {mismatch:.3e} at boundary node {node}")]
    Incompatible { node: usize, mismatch: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
