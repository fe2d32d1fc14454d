use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no input values")]
    EmptyInput,
    #[error("negative weight {0}")]
    NegativeWeight(Rational),
    #[error("weights sum to zero")]
    ZeroTotalWeight,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(Rational),
    #[error("parameter {0} must lie strictly between 0 and 1")]
    ParameterOutOfRange(Rational),
    #[error("level {0} must lie strictly between 0 and 1")]
    LevelOutOfRange(Rational),
    #[error("scale factor {0} must be positive")]
    NonPositiveScale(Rational),
    #[error("joint distribution needs dimension >= 1")]
    ZeroDimension,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("coordinate index {index} outside 1..={dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
    #[error("joint support exceeds {limit} points")]
    TooManyPoints { limit: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("expected {expected} permutations of length {len}")]
    InvalidPermutation { expected: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
