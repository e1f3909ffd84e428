//! Crate-wide error type.
//!
//! Errors split into two classes: *validation* errors, which mean the caller
//! handed in data outside an operation's domain (bad prime, wrong parity,
//! inconsistent pair of spaces, malformed JSON, ...), and *internal* errors,
//! which mean a proven invariant failed and indicate a bug. The CLI maps the
//! former to exit code 2 and the latter to exit code 1.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("zero has no square class")]
    ZeroSquareClass,

    #[error("prime mismatch: p = {0} vs p = {1}")]
    PrimeMismatch(u64, u64),

    #[error("the trivial square class does not define a quadratic extension")]
    TrivialExtension,

    #[error("expected an even-dimensional space, got dimension {0}")]
    ExpectedEvenDim(usize),

    #[error("expected an odd-dimensional space, got dimension {0}")]
    ExpectedOddDim(usize),

    #[error("discriminant is trivial: {0}")]
    TrivialDiscriminant(&'static str),

    #[error("the split reference condition fails: {0}")]
    NotQuasiSplitReference(&'static str),

    #[error("incompatible pair of spaces: {0}")]
    GpPairInvalid(String),

    #[error("(d, delta) = ({dd}, {delta}) is not an admissible dimension/discriminant pair here")]
    NotInDset { dd: usize, delta: String },

    #[error("eigenvalue {0} is excluded here (pole or degenerate parameter)")]
    ExcludedEigenvalue(String),

    #[error("parameter family is not regular: {0}")]
    NotRegular(String),

    #[error("no admissible class parameter: {0}")]
    EmptyAdmissibleSet(String),

    #[error("class parameter lies outside the admissible coset")]
    InadmissibleCoset,

    #[error("root-number table is missing the pair ({i}, {iprime})")]
    MissingTableEntry { i: String, iprime: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Schema/field error with a JSON-pointer-style path to the offending field.
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Whether this error indicates a bug in the library rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
