use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("incompatible groups: {left:?} vs {right:?}")]
    IncompatibleGroups { left: Vec<u32>, right: Vec<u32> },

    #[error("element coordinates {coords:?} do not belong to group {factors:?}")]
    NotAnElement { coords: Vec<u32>, factors: Vec<u32> },

    #[error("tensor shape error: {0}")]
    TensorShape(String),

    #[error("cochain is not normalized at {at:?}")]
    NotNormalized { at: Vec<usize> },

    #[error("table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },

    #[error("not a 3-cocycle: coboundary nonzero at quadruple {quadruple:?}")]
    NotCocycle3 { quadruple: [usize; 4] },

    #[error("not a 2-cocycle: coboundary nonzero at triple {triple:?}")]
    NotCocycle2 { triple: [usize; 3] },

    #[error("3-cocycle is not a coboundary of any 2-cochain")]
    NotACoboundary,

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("associativity cocycle not constant for triple {triple:?} (points {points:?})")]
    NonConstantCocycle { triple: [usize; 3], points: [usize; 2] },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("algebra mismatch: {0}")]
    ParentMismatch(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("twist data violates {relation} at {at:?} (error {error:e})")]
    TwistRelation { relation: &'static str, at: Vec<usize>, error: f64 },

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("parse error: {0}")]
    Parse(String),
}
