//! Exact-arithmetic workbench for group cohomology over group rings.
//!
//! The crate computes, with arbitrary-precision integer arithmetic:
//! modules over group rings of finite groups, free resolutions, cohomology
//! and Ext groups, the canonical class and its powers, the obstruction
//! spectral sequence for essential cohomology classes, and zero-divisor
//! cup-lengths of graded cohomology rings together with the resulting
//! topological-complexity bounds.

pub mod cache;
pub mod canonical;
pub mod cohomology;
pub mod couple;
pub mod groups;
pub mod linalg;
pub mod modules;
pub mod resolutions;
pub mod rings;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition of boundary maps is not zero")]
    CompositionNotZero,
    #[error("unknown group family: {0}")]
    UnknownFamily(String),
    #[error("group order too large: {0}")]
    OrderTooLarge(String),
    #[error("tuple enumeration too large: {0}")]
    TooManyTuples(String),
    #[error("module rank too large: {0}")]
    RankTooLarge(String),
    #[error("acting groups do not match: {0}")]
    GroupMismatch(String),
    #[error("construction too large: {0}")]
    TooLarge(String),
    #[error("degree {degree} out of range for resolution of depth {d_max}")]
    DegreeOutOfRange { degree: usize, d_max: usize },
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("no integral splitting found: {0}")]
    NoSplitting(String),
    #[error("chain-map lift failed: {0}")]
    LiftFailed(String),
    #[error("chain-map identity failed: {0}")]
    ChainMapCheckFailed(String),
    #[error("cross-check between independent computations failed: {0}")]
    CrossCheckFailed(String),
    #[error("cocycle conversion between resolutions failed: {0}")]
    ConversionFailed(String),
    #[error("exact-couple invariant violated: {0}")]
    ExactnessCheckFailed(String),
    #[error("algebraic identity check failed: {0}")]
    IdentityCheckFailed(String),
    #[error("search budget exceeded; best lower bound found: {0}")]
    SearchBudgetExceeded(usize),
    #[error("unknown space or ring spec: {0}")]
    UnknownSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
