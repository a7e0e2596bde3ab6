use thiserror::Error;

/// Errors raised by the counting library.
#[derive(Debug, Error)]
pub enum MotifError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no edges")]
    NoEdges,

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("vertex {0} listed more than once")]
    DuplicateVertex(u32),

    #[error("vertex set must not be empty")]
    EmptySet,

    #[error("subgraph size {size} outside supported range {min}..={max}")]
    SizeOutOfRange { size: usize, min: usize, max: usize },

    #[error("motif size {k} exceeds vertex count {n}")]
    MotifLargerThanGraph { k: usize, n: usize },

    #[error("invalid class label {0:?}")]
    InvalidLabel(String),

    #[error("adjacency code {bits:#x} does not fit size {k}")]
    InvalidCode { k: usize, bits: u32 },

    #[error("base subgraph {0:?} is not connected")]
    DisconnectedBase(Vec<u32>),

    #[error("pattern {0} is not connected")]
    DisconnectedPattern(String),

    #[error(
        "class census for k=6 scans 2^30 adjacency matrices and may run for a long time; \
         pass the long-run flag to proceed"
    )]
    LongRunRequired,

    #[error(
        "raw count {raw} of pattern {pattern} is not divisible by its multiplicity {multiplicity}"
    )]
    InexactDivision {
        pattern: String,
        raw: i64,
        multiplicity: u64,
    },

    #[error("invalid randomizer configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = MotifError> = std::result::Result<T, E>;
