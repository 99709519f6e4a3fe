use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("multi-index must have at least one entry")]
    EmptyIndex,

    #[error("shift exponent entries must be >= 1, got {0}")]
    ZeroShiftEntry(String),

    #[error("residue {j} is not below {n} componentwise")]
    ResidueOutOfRange { j: String, n: String },

    #[error("log_gamma requires a positive argument, got {0}")]
    NonPositiveArgument(f64),

    #[error("invalid space parameters: {0}")]
    InvalidParams(String),

    #[error("image index {index} of domain index {source_index} lies outside the codomain basis")]
    CodomainTooSmall { source_index: String, index: String },

    #[error("target index mismatch: {left} vs {right}")]
    TargetMismatch { left: String, right: String },

    #[error("index {index} is outside the domain of {operator}")]
    OutsideDomain { operator: String, index: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),
}
