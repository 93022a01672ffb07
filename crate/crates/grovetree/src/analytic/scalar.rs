//! Numeric abstraction for the closed-form evaluators.
//!
//! Every formula in this module's parent is a rational function of the
//! distribution moments, so the same code evaluates in `f64` (the everyday
//! path) and in exact `BigRational` (used wherever a test wants integer or
//! rational equality instead of a tolerance).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

pub trait Scalar:
    Clone
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn from_u128(v: u128) -> Self;
    /// Exact conversion of a finite `f64` (every finite f64 is rational).
    fn from_f64(v: f64) -> Self;

    /// Nonnegative integer power by binary exponentiation.
    fn powu(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn from_u128(v: u128) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_u128(v: u128) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("probabilities are finite")
    }
}

/// `x * (x - 1) / 2`, the pair count.
pub fn binom2<T: Scalar>(x: &T) -> T {
    x.clone() * (x.clone() - T::one()) / T::from_u64(2)
}
