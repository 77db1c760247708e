use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberFieldError {
    #[error("zero is not allowed in a multiplicative relation lattice")]
    ZeroEigenvalue,
    #[error("polynomial `{0}` is not irreducible of positive degree")]
    NotIrreducible(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not invariant under generator {generator}")]
    NotInvariant { generator: usize },
    #[error("submodule search exhausted its probe budget in dimension {dim}")]
    ProbeExhausted { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZariskiError {
    #[error("generator {0} is singular")]
    Singular(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolenoidError {
    #[error("a = {0} is not a square-free positive integer")]
    NotSquareFree(u64),
    #[error("dimension d must be at least 1")]
    ZeroDimension,
    #[error("generator {index}: {what} has shape {found}, expected {expected}")]
    Shape {
        index: usize,
        what: &'static str,
        found: String,
        expected: String,
    },
    #[error("generator {index}: matrix entry {entry} has a denominator with a prime outside a")]
    BadDenominator { index: usize, entry: String },
    #[error("generator {index}: determinant {det} is not a unit of Z[1/a]")]
    NotAUnit { index: usize, det: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoopmanError {
    #[error("truncation height must be at least 1")]
    EmptyTruncation,
    #[error("truncation has {count} characters, above the cap of {cap}")]
    TruncationTooLarge { count: usize, cap: usize },
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("truncations must be nonempty and increasing")]
    BadTruncationList,
    #[error("entries exceed the machine-integer range of the simulator")]
    Overflow,
}

/// Top-level error for the decision layer and the command line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Solenoid(#[from] SolenoidError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Zariski(#[from] ZariskiError),
    #[error(transparent)]
    NumberField(#[from] NumberFieldError),
    #[error(transparent)]
    Koopman(#[from] KoopmanError),
}
