//! Error type shared across the crate.

use std::fmt;

/// Errors produced by constructors, kernels and I/O routines.
#[derive(Debug)]
pub enum Error {
    /// A triple or vector entry lies outside the declared dimensions.
    IndexOutOfBounds {
        index: (usize, usize),
        bounds: (usize, usize),
    },
    /// The same (row, col) or vector index appeared twice and no combining
    /// semiring was supplied.
    DuplicateEntry { row: usize, col: usize },
    /// Operand shapes are incompatible.
    DimensionMismatch(String),
    /// A preallocated workspace is too small for this call. Workspaces never
    /// grow implicitly; resize by constructing a new one.
    CapacityExceeded {
        what: &'static str,
        needed: usize,
        capacity: usize,
    },
    /// A generator or kernel configuration parameter is out of range.
    InvalidConfig(String),
    /// A workspace buffer could not be allocated.
    AllocationFailure,
    /// A kernel that binary-searches within columns was given a matrix
    /// without per-column sorted row ids.
    UnsortedColumns(&'static str),
    /// Text input could not be parsed. `line` is 1-based; 0 means the
    /// location is not line-oriented.
    Parse { line: usize, msg: String },
    /// The file declares a format variant this crate does not read.
    UnsupportedFormat(String),
    /// BFS source vertex is outside the graph.
    SourceOutOfRange { source: usize, nverts: usize },
    /// BFS requires a square adjacency matrix.
    NotSquare { nrows: usize, ncols: usize },
    /// Two kernels disagreed on BFS levels for the same graph and source.
    LevelMismatch {
        vertex: usize,
        expected: u32,
        got: u32,
    },
    Io(std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfBounds { index, bounds } => write!(
                f,
                "index ({}, {}) out of bounds for {}x{}",
                index.0, index.1, bounds.0, bounds.1
            ),
            Error::DuplicateEntry { row, col } => {
                write!(f, "duplicate entry at ({row}, {col}) and no combiner given")
            }
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::CapacityExceeded {
                what,
                needed,
                capacity,
            } => write!(
                f,
                "workspace {what} capacity exceeded: need {needed}, have {capacity}"
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::AllocationFailure => write!(f, "workspace allocation failed"),
            Error::UnsortedColumns(kernel) => {
                write!(f, "{kernel} requires per-column sorted row ids")
            }
            Error::Parse { line, msg } => {
                if *line == 0 {
                    write!(f, "parse error: {msg}")
                } else {
                    write!(f, "parse error at line {line}: {msg}")
                }
            }
            Error::UnsupportedFormat(msg) => write!(f, "unsupported format: {msg}"),
            Error::SourceOutOfRange { source, nverts } => {
                write!(f, "source vertex {source} out of range for {nverts} vertices")
            }
            Error::NotSquare { nrows, ncols } => {
                write!(f, "adjacency matrix must be square, got {nrows}x{ncols}")
            }
            Error::LevelMismatch {
                vertex,
                expected,
                got,
            } => write!(
                f,
                "BFS level mismatch at vertex {vertex}: expected {expected}, got {got}"
            ),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
