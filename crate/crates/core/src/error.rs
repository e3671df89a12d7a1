use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared across the crate.
///
/// Step sizes and other scalars are carried as `f64` regardless of the
/// working precision so that errors stay `Send + Sync + Clone` and printable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("matrix is singular to tolerance (pivot {index})")]
    Singular { index: usize },

    #[error("pole at z = {z}")]
    Pole { z: f64 },

    #[error("excluded point z = {z}: step map undefined")]
    Excluded { z: f64 },

    #[error("Newton iteration failed after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("substep {index} failed: {source}")]
    Substep { index: usize, source: Box<Error> },

    #[error("{0} is only defined for linear problems")]
    Unsupported(&'static str),

    #[error("({p}, {q}) is not a fixed point of the map (residual {residual:e})")]
    NotFixedPoint { p: f64, q: f64, residual: f64 },

    #[error("A-stable shortcut and stability-function route disagree at z = {z}")]
    RouteMismatch { z: f64 },

    #[error("composed map is not area preserving at z = {z} (det = {det})")]
    NotSymplectic { z: f64, det: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for failures that mark a step size as outside the domain of the
    /// step map rather than a genuine bug or misuse.
    pub fn is_excluded_point(&self) -> bool {
        match self {
            Error::Singular { .. }
            | Error::Pole { .. }
            | Error::Excluded { .. }
            | Error::RouteMismatch { .. }
            | Error::NotSymplectic { .. } => true,
            Error::Substep { source, .. } => source.is_excluded_point(),
            _ => false,
        }
    }
}
