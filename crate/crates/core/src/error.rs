use crate::filter::Violation;
use crate::graph::Pair;
use thiserror::Error;

/// Crate-wide error type.
///
/// Validation *findings* (filter violations, cover violations) are ordinary
/// data returned by the `validate`/`verify` functions; an `Error` is raised
/// only when an operation cannot produce a result at all.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state id {0}")]
    UnknownState(usize),

    #[error("unknown observation id {0}")]
    UnknownObservation(usize),

    #[error("vertex {vertex} out of range for graph with {vertices} vertices")]
    VertexOutOfRange { vertex: usize, vertices: usize },

    #[error("a pair must have two distinct vertices (got {0} twice)")]
    DegeneratePair(usize),

    #[error("observation alphabets differ")]
    AlphabetMismatch,

    #[error("invalid filter: {}", format_violations(.0))]
    InvalidFilter(Vec<Violation>),

    #[error("pair {0} is not an edge of the graph")]
    NotAnEdge(Pair),

    #[error("self-loops are not allowed (vertex {0})")]
    SelfLoop(usize),

    #[error("invalid prescription: {0}")]
    BadPrescription(String),

    #[error("prescription is not downstream enabled")]
    NotDownstreamEnabled,

    #[error("pair {0} does not have comparable neighborhoods")]
    NotRepairable(Pair),

    #[error("cover violates its contract: {0}")]
    BadCover(String),

    #[error("invalid instance: {0}")]
    BadInstance(String),

    #[error("instance has {vertices} vertices, exceeding the brute-force guard of {guard}")]
    SizeGuard { vertices: usize, guard: usize },

    #[error("invalid generator spec: {0}")]
    BadGenSpec(String),

    #[error("enumeration bounds too large: {0}")]
    EnumGuard(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unsupported document version {0} (expected 1)")]
    UnsupportedVersion(u32),

    #[error("filter reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("prescription {prescription}: repaired cover fails verification: {violations}")]
    RepairedCoverInvalid {
        prescription: usize,
        violations: String,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that indicate a bug in the solver pipeline rather
    /// than a problem with the caller's input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Reconstruction(_) | Error::Internal(_) | Error::RepairedCoverInvalid { .. }
        )
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
