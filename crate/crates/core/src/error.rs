use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite coefficient in {0}")]
    NonFinite(String),

    #[error("simplex iteration cap of {0} exceeded")]
    IterationCap(usize),

    #[error("cone is not pointed: rank {rank} < dimension {dim}")]
    NotPointed { rank: usize, dim: usize },

    #[error("interior direction violates row {row}: a_j^T e <= 0")]
    NotInterior { row: usize },

    #[error("cone row {row} is zero")]
    ZeroRow { row: usize },

    #[error("cone has no rows")]
    EmptyCone,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate decision label `{0}`")]
    DuplicateLabel(String),

    #[error("image `{0}` is empty")]
    EmptyImage(String),

    #[error("dimension mismatch at {field}: expected {expected}, found {found}")]
    DimMismatch {
        field: String,
        expected: usize,
        found: usize,
    },

    #[error("instance has no decisions")]
    NoDecisions,

    #[error("image kinds mixed: finite image `{finite}` compared against polytope image `{polytope}`")]
    MixedImageKinds { finite: String, polytope: String },

    #[error("operation requires a finite image")]
    PolytopeUnsupported,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("unknown decision label `{0}`")]
    UnknownLabel(String),

    #[error("enumeration cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("weight {index} is not in the dual cone")]
    WeightNotInDualCone { index: usize },

    #[error("decision sets differ: {0}")]
    MismatchedDecisions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
