use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("non-finite sample {value} at node {index} (x = {coords:?})")]
    NonFinite {
        index: usize,
        coords: Vec<f64>,
        value: f64,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("grid has a node at the origin; the Hardy weight |x|^-2s is singular there, use an offset grid")]
    NodeAtOrigin,

    #[error("field is identically zero: {0}")]
    ZeroField(&'static str),

    #[error("pair is not on the Nehari manifold (|phi| = {phi:e} > {tol:e}); project it first")]
    OffManifold { phi: f64, tol: f64 },

    #[error("Nehari projection failed: {0}")]
    ProjectionFailed(String),

    #[error("solver stopped after {iters} iterations: {source}")]
    SolveFailed {
        iters: usize,
        /// Last iterate that was on the manifold.
        last: Box<crate::field::FieldPair>,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Empty(&'static str),

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
