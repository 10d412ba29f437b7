//! Finite ergodic components for upper probabilities on finite spaces.
//!
//! All values are exact rationals. A space has at most [`space::MAX_POINTS`]
//! points and every subset is a [`SubsetMask`].

pub mod error;
pub mod fec;
pub mod function;
pub mod koopman;
pub mod birkhoff;
pub mod capacity;
pub mod cli;
mod linalg;
pub mod measure;
pub mod noninvariant;
pub mod oracle;
mod polytope;
pub mod random;
pub mod rational;
pub mod space;

pub use capacity::UpperProb;
pub use error::{Error, Result};
pub use function::FunctionOnSpace;
pub use measure::Prob;
pub use rational::Rational;
pub use space::{FiniteSpace, Partition, SubsetMask, Transformation};
