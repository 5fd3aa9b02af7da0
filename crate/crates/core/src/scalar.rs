//! Scalar traits for the generic linear-algebra layer.
//!
//! Matrices, truncated t-series and the Smith normal form are written against
//! these traits rather than a fixed coefficient type. They mirror the
//! num-traits `Zero`/`One` pair, with one twist: several of our scalars carry
//! context (a polynomial needs its variable registry), so the neutral elements
//! are derived from an existing value (`zero_like`) instead of a nullary
//! constructor. For context-free scalars the two coincide.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::Rat;
use num_traits::{One, Zero};

/// A commutative ring element usable in generic matrix code.
pub trait RingScalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Additive identity compatible with `self` (same registry, etc.).
    fn zero_like(&self) -> Self;
    /// Multiplicative identity compatible with `self`.
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
}

/// A field element: a ring scalar with exact division.
pub trait FieldScalar: RingScalar + Div<Output = Self> {
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self> {
        if RingScalar::is_zero(self) {
            None
        } else {
            Some(self.one_like() / self.clone())
        }
    }
}

impl RingScalar for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn one_like(&self) -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl FieldScalar for Rat {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_scalar_basics() {
        let x = Rat::new(3.into(), 4.into());
        assert!(RingScalar::is_zero(&x.zero_like()));
        assert_eq!(x.one_like() * x.clone(), x);
        assert_eq!(x.inv().unwrap() * x, Rat::one());
        assert_eq!(Rat::zero().inv(), None);
    }
}
