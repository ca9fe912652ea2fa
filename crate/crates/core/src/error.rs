use thiserror::Error;

use crate::vertex::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded at level {level}: {what} {requested} exceeds cap {cap}")]
    BudgetExceeded {
        level: u32,
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("level {0} has not been built")]
    LevelNotBuilt(u32),

    #[error("vertex {vertex:?} is not in V_{level}")]
    NotInLevel { vertex: VertexId, level: u32 },

    #[error("malformed vertex encoding at byte {pos}: {reason}")]
    Decode { pos: usize, reason: String },

    #[error(
        "graph G_{level} is disconnected: source {source_label} reaches {reached} of {total} vertices (first unreached: {unreached_label})"
    )]
    Disconnected {
        level: u32,
        source_label: String,
        reached: usize,
        total: usize,
        unreached_label: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("geodesic sample needs level {needed} but only G_{available} is available")]
    SampleLevelExceeded { needed: u32, available: u32 },

    #[error("target midpoint map violates the conical axioms: {0}")]
    NotConical(String),

    #[error("cone witness chain is inconsistent at step {step}: {reason}")]
    InconsistentWitness { step: usize, reason: String },

    #[error("certificate failed independent verification: {0}")]
    CertificateRejected(String),

    #[error("missing base count: {0}")]
    MissingCount(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Error {
        Error::Io(e.into())
    }
}
