use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed mesh file at line {line}, column {column}: {message}")]
    MalformedFile {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("topology error in cell {cell}: {message}")]
    Topology { cell: usize, message: String },

    #[error("face {face} is not planar: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    Planarity {
        face: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("entity is not star-shaped with respect to its centroid: {0}")]
    StarShape(String),

    #[error("degenerate system: {0}")]
    DegenerateSystem(String),

    #[error("solver failed: relative residual {residual:.3e} above target {target:.3e}")]
    SolverFailure { residual: f64, target: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
