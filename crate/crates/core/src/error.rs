use thiserror::Error;

use crate::space::SubsetMask;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Domain errors raised by the library.
///
/// Width mismatches between values built for different spaces are
/// programming errors and panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space size {0} is outside 1..={max}", max = crate::space::MAX_POINTS)]
    SpaceSize(usize),
    #[error("point {point} is out of range for a space of {size} points")]
    PointOutOfRange { point: usize, size: usize },
    #[error("subset bits {bits:#x} do not fit a space of {width} points")]
    MaskOutOfRange { bits: u32, width: usize },
    #[error("not a probability: {0}")]
    NotAProbability(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("an upper probability needs at least one generator")]
    EmptyGenerators,
    #[error("the capacity is not invariant under the map")]
    NotInvariantCapacity,
    #[error("the probability is not invariant under the map")]
    NotInvariantProbability,
    #[error("the map is not invertible")]
    NotInvertible,
    #[error("the probability does not lie in the core")]
    NotInCore,
    #[error("no core element satisfies the restriction to {0}")]
    EmptyRestrictedCore(SubsetMask),
    #[error("not of finite ergodic components: invariant set {witness} has capacity strictly between 0 and 1")]
    NotFec { witness: SubsetMask },
    #[error("no ergodic probability lies in the core")]
    NoErgodicCoreMeasures,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
