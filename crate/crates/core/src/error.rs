use thiserror::Error;

use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank {0}: sl_r needs r >= 2")]
    InvalidRank(usize),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("coordinates must sum to zero, got {0}")]
    NonzeroTrace(Q),
    #[error("weight {0} is not in the weight lattice")]
    NotInWeightLattice(String),
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("quadratic coefficient must be positive, got {0}")]
    NonPositiveQuadratic(Q),
    #[error("p = {p} and p' = {pp} are not coprime")]
    NotCoprime { p: u64, pp: u64 },
    #[error("p and p' must be positive, got p = {p}, p' = {pp}")]
    NonPositiveParameter { p: u64, pp: u64 },
    #[error("p' = {0} must be odd and at least 3")]
    InvalidOddParameter(u64),
    #[error("shift index j = {j} out of range 0..{r}")]
    ShiftOutOfRange { j: usize, r: usize },
    #[error("division by a series with no nonzero term below its truncation")]
    DivisionByNonUnit,
    #[error("exact division left a nonzero remainder")]
    InexactDivision,
    #[error("series has no nonzero term below its truncation")]
    NoTrailingTerm,
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("malformed parameters: {0}")]
    MalformedParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
