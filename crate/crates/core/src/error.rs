use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Schema or invariant violation in a scene document. `pointer` is a
    /// JSON pointer to the offending field.
    #[error("invalid scene at `{pointer}`: {message}")]
    InvalidScene { pointer: String, message: String },

    #[error("building id sets differ between scenes; offending ids: {ids:?}")]
    SceneMismatch { ids: Vec<u32> },

    #[error("unknown building id {0}")]
    UnknownBuilding(u32),

    #[error(
        "could not place building {placed} of {requested} (seed {seed}, extent {extent} m, \
         density {density:.2e} buildings/m^2) after {attempts} attempts"
    )]
    Placement {
        seed: u64,
        requested: usize,
        placed: usize,
        extent: f64,
        density: f64,
        attempts: usize,
    },

    #[error("refinement plan selects {selected} buildings but the budget is {budget}")]
    OverBudget { selected: usize, budget: usize },

    #[error("the receiver proxy set is empty")]
    NoRxProxies,

    #[error("no cell exceeds the coverage threshold {threshold_db} dB")]
    EmptyCoverage { threshold_db: f64 },

    #[error("zero channel vector")]
    ZeroChannel,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed {what}: {message}")]
    Parse { what: &'static str, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
