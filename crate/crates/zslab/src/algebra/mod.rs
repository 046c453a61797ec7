//! Exact arithmetic for finite abelian groups and sequences over them.

mod group;
mod map;
mod sequence;

pub use group::{GroupElement, GroupSpec};
pub use map::GroupMap;
pub use sequence::{Sequence, SequenceFlags};

pub(crate) use group::GroupTable;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("not a divisor")]
    NotADivisor,
    #[error("generator images do not define a homomorphism")]
    NotWellDefined,
}
