use thiserror::Error;

/// Errors surfaced by the laboratory's operations.
///
/// Configuration problems carry a path-qualified location (`params.alpha`,
/// `grid.n`, ...) so a bad run config can be fixed without reading source.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("fields live on different grids ({0:?} vs {1:?})")]
    GridMismatch(crate::grid::TorusGrid, crate::grid::TorusGrid),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("frequency band {band} is not resolvable on the grid (max |ξ| = {max_xi})")]
    BandNotResolvable { band: f64, max_xi: f64 },

    #[error("scaling factor {0} is not a power of two")]
    NotPowerOfTwo(f64),

    #[error("admissible frequency set is empty: {0}")]
    EmptyAdmissibleSet(String),

    #[error("case condition violated: {0}")]
    CaseCondition(String),

    #[error("frequency boxes overlap or touch the origin: {0}")]
    BoxOverlap(String),

    #[error("empty frequency intersection: output box never meets the input boxes")]
    EmptyIntersection,

    #[error("time mesh too coarse: {0} intervals (need at least 8)")]
    MeshTooCoarse(usize),

    #[error("fit needs at least 4 samples, got {0}")]
    TooFewSamples(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed snapshot: {0}")]
    BadSnapshot(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
