use thiserror::Error;

/// Errors raised by grid construction, samplers and the configuration layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: {nodes} nodes (at least 9 required)")]
    GridTooCoarse { nodes: usize },

    #[error("grid too coarse: h = {h} (at most 0.25)")]
    CoarseSpacing { h: f64 },

    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),

    #[error("path leaves domain at ({x}, {y})")]
    PathLeavesDomain { x: f64, y: f64 },

    #[error("angle singular at origin: ({x}, {y})")]
    AngleSingular { x: f64, y: f64 },

    #[error("family singular here: {family} at ({x}, {y})")]
    FamilySingular { family: &'static str, x: f64, y: f64 },

    #[error("degenerate Mohr radius: K = {k} at ({x}, {y})")]
    DegenerateMohrRadius { k: f64, x: f64, y: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
