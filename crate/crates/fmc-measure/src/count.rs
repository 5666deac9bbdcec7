use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// The carrier of step counts.
pub trait Count: Clone + Ord + Zero + One + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Addition, saturating where the representation is bounded.
    fn plus(&self, other: &Self) -> Self;
}

impl Count for u64 {
    fn plus(&self, other: &u64) -> u64 {
        self.saturating_add(*other)
    }
}

impl Count for BigUint {
    fn plus(&self, other: &BigUint) -> BigUint {
        self + other
    }
}

/// Machine-word counts. Sums saturate at `u64::MAX`.
pub type Count64 = u64;
/// Unbounded counts.
pub type CountBig = BigUint;
