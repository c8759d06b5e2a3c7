//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while validating inputs or running a computation.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live on the same ground set (or the same number of
    /// tensor factors) do not.
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    /// A list of images is not a bijection of `{1..n}`.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// Blocks do not form a partition of `{1..n}`.
    #[error("invalid set partition: {0}")]
    InvalidPartition(String),

    /// A refinement precondition (`small ≤ big`) does not hold.
    #[error("refinement precondition violated: {0}")]
    NotRefinement(String),

    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An operation that requires a connected graph received a disconnected one.
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    /// A configured enumeration / size cap would be exceeded.
    #[error("cap exceeded for {what}: requested {requested}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// The scaling ansatz does not belong to one of the classified families.
    #[error("ansatz outside the covered families: {0}")]
    OutsideFamily(String),

    /// A state constructor received inconsistent dimensions.
    #[error("invalid state specification: {0}")]
    InvalidState(String),

    /// An invariant table lacks an entry that a computation needs.
    #[error("missing invariant for tuple {0}")]
    MissingInvariant(String),

    /// A linear system or least-squares problem is singular or rank deficient.
    #[error("rank-deficient or singular system: {0}")]
    RankDeficient(String),

    /// A quantity that must be strictly positive is not.
    #[error("non-positive value: {0}")]
    NonPositive(String),

    /// Generic invalid argument (out-of-range dimension, too few samples, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical sanity check failed (e.g. a non-negligible imaginary residue).
    #[error("numerical check failed: {0}")]
    Numerical(String),

    /// Binary tensor file is malformed.
    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the cap-exceeded variant (the CLI maps it to its own exit code).
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
