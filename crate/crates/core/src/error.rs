use std::path::PathBuf;

use crate::domain::RecordId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("value {value} lies outside the mapped domain [{min}, {max}]")]
    OutOfDomain { value: u64, min: u64, max: u64 },

    #[error("interval {id} has start {st} after end {end}")]
    InvertedInterval { id: RecordId, st: u64, end: u64 },

    #[error("endpoint {value} does not fit in {m} bits; use a HINT^m index for wider domains")]
    EndpointTooWide { value: u64, m: u32 },

    #[error("level parameter m = {0} is outside the supported range 1..=30")]
    InvalidLevels(u32),

    #[error("record id {0} appears more than once")]
    DuplicateId(RecordId),

    #[error("record id {0} is reserved")]
    ReservedId(RecordId),

    #[error("record id {0} has been deleted and cannot be reused before a flush")]
    Tombstoned(RecordId),

    #[error("record id {0} is not live in this index")]
    NotFound(RecordId),

    #[error("the query-optimized index is read-only; insert through a hybrid index")]
    ImmutableIndex,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error("result checksums differ: {0}")]
    ChecksumMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
