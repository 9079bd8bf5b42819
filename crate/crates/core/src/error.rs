use thiserror::Error;

use crate::model::{FileId, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operand length mismatch: expected {expected} bits, found {found}")]
    LengthMismatch { expected: u64, found: u64 },

    #[error("bit range {start}..{end} out of bounds for length {len}")]
    OutOfBounds { start: u64, end: u64, len: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("not feasible: {0}")]
    NotFeasible(String),

    #[error("placement needs {files} files, above the limit of {limit}")]
    FileLimit { files: u128, limit: u64 },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("workload produced {found} bits for v[{function},{file}], expected {expected}")]
    SizeMismatch {
        function: NodeId,
        file: FileId,
        expected: u64,
        found: u64,
    },

    #[error("node {node} failed to decode v[{function},{file}]")]
    DecodeFailure {
        node: NodeId,
        file: FileId,
        function: NodeId,
    },

    #[error("plan defect: {0}")]
    PlanDefect(String),

    #[error("key {key} outside [0, {bound})")]
    KeyOutOfRange { key: u32, bound: u32 },

    #[error("sort violation at output position {position}: {detail}")]
    SortViolation { position: usize, detail: String },

    #[error("dataset length {0} is not a multiple of the record size")]
    TruncatedDataset(usize),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code used by the `cdc` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::NotFeasible(_)
            | Error::FileLimit { .. }
            | Error::Overflow(_) => 2,
            Error::DecodeFailure { .. } | Error::SortViolation { .. } | Error::PlanDefect(_) => 3,
            _ => 1,
        }
    }
}
