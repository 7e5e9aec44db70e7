use thiserror::Error;

/// Errors surfaced by circuit construction, noise sampling, model building and decoding.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),

    #[error("rounds must be at least 1, got {0}")]
    InvalidRounds(usize),

    #[error("probability `{name}` = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("kraus set is not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("loss/fault record does not belong to this circuit: {0}")]
    ProvenanceMismatch(String),

    #[error("loss location {site} is outside the window of node {node}")]
    LocationOutsideWindow { node: String, site: String },

    #[error("negative mixture weight {0}")]
    NegativeWeight(f64),

    #[error("detector count mismatch: {left} vs {right}")]
    DetectorCountMismatch { left: usize, right: usize },

    #[error("mechanism #{index} (detectors {detectors:?}) cannot be decomposed into graph edges")]
    Undecomposable { index: usize, detectors: Vec<u32> },

    #[error("herald {0} does not match any measured atom with entangling gates in its window")]
    UnknownHerald(String),

    #[error("k-matching search exceeded cap (component with {nodes} nodes, {edges} edges)")]
    MatchingCapExceeded { nodes: usize, edges: usize },

    #[error("defect at detector {0} cannot be matched: no path to another defect or the boundary")]
    DisconnectedDefect(u32),

    #[error("syndrome references detector {0} outside the matching graph")]
    UnknownDetector(u32),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
