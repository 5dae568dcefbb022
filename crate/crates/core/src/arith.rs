//! Scalar arithmetic with optional bookkeeping.
//!
//! The same code path is used to build reciprocal plans and to apply them to a
//! single element. [`Plain`] compiles down to bare operations; [`Tally`]
//! counts divisions and records whether any product or quotient underflowed
//! with a rounding error.

use crate::real::Real;

pub(crate) trait Arith<T: Real> {
    fn mul(&mut self, a: T, b: T) -> T;
    fn div(&mut self, a: T, b: T) -> T;
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Plain;

impl<T: Real> Arith<T> for Plain {
    #[inline(always)]
    fn mul(&mut self, a: T, b: T) -> T {
        a * b
    }

    #[inline(always)]
    fn div(&mut self, a: T, b: T) -> T {
        a / b
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub divisions: u32,
    /// Some result fell below the normal range and was rounded.
    pub underflow: bool,
}

fn lost_to_underflow<T: Real>(a: T, b: T, r: T) -> bool {
    a != T::zero() && b != T::zero() && a.is_finite() && b.is_finite() && r.abs() < T::SFMIN
}

impl<T: Real> Arith<T> for Tally {
    fn mul(&mut self, a: T, b: T) -> T {
        let p = a * b;
        if lost_to_underflow(a, b, p) && !T::mul_is_exact(a, b, p) {
            self.underflow = true;
        }
        p
    }

    fn div(&mut self, a: T, b: T) -> T {
        self.divisions += 1;
        let q = a / b;
        if lost_to_underflow(a, b, q) && !T::div_is_exact(a, b, q) {
            self.underflow = true;
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_flags_only_inexact_underflow() {
        let mut t = Tally::default();
        let _ = t.mul(f32::pow2(-120), f32::pow2(-10));
        assert!(!t.underflow, "2^-130 is exactly representable");
        let _ = t.mul(f32::pow2(-140), f32::pow2(-20));
        assert!(t.underflow, "2^-160 flushes to zero");

        let mut t = Tally::default();
        let _ = t.div(1.0f32, 3.0);
        let _ = t.div(f32::pow2(-126), 3.0);
        assert_eq!(t.divisions, 2);
        assert!(t.underflow);
    }
}
