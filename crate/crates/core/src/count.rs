//! The numeric contract for counts produced by the engine.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Zero};

/// An exact non-negative count with checked arithmetic.
///
/// Implemented for every type with the right num-traits bounds, so `u64`,
/// `u128` and arbitrary-precision integers all work.
pub trait Count:
    Clone + Ord + Hash + Zero + One + CheckedAdd + CheckedSub + CheckedMul + FromPrimitive + Display + Debug
{
}

impl<T> Count for T where
    T: Clone + Ord + Hash + Zero + One + CheckedAdd + CheckedSub + CheckedMul + FromPrimitive + Display + Debug
{
}
