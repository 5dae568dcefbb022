use std::ops::{Add, Mul, Neg, Sub};

use crate::real::Real;

/// A complex value stored as two same-precision parts.
///
/// Signed zeros, subnormals, infinities and NaNs are stored as given. There
/// is no `Div` impl; divisions are spelled out where they occur.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Complex<T> {
    pub const fn new(re: T, im: T) -> Self {
        Complex { re, im }
    }

    pub fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Complex::new(T::one(), T::zero())
    }

    pub fn from_real(re: T) -> Self {
        Complex::new(re, T::zero())
    }

    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    pub fn is_nan(self) -> bool {
        self.re.is_nan() || self.im.is_nan()
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.re.is_infinite() || self.im.is_infinite()
    }

    /// Both parts are (signed) zero.
    pub fn is_zero(self) -> bool {
        self.re == T::zero() && self.im == T::zero()
    }

    /// `|re| + |im|`, the pivot magnitude used by partial pivoting.
    pub fn abs1(self) -> T {
        self.re.abs() + self.im.abs()
    }

    /// Modulus without intermediate overflow.
    pub fn norm(self) -> T {
        self.re.hypot(self.im)
    }

    /// Bitwise equality of both parts.
    pub fn bits_eq(self, other: Self) -> bool {
        self.re.to_bits_u64() == other.re.to_bits_u64()
            && self.im.to_bits_u64() == other.im.to_bits_u64()
    }

    pub fn widen(self) -> Complex<f64> {
        Complex::new(self.re.widen(), self.im.widen())
    }
}

impl<T: Real> Add for Complex<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<T: Real> Sub for Complex<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<T: Real> Neg for Complex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

/// Conventional four-multiply, two-add product.
impl<T: Real> Mul for Complex<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Complex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_uses_conventional_scheme() {
        let z = Complex::new(1.0f64, 2.0) * Complex::new(3.0, -1.0);
        assert_eq!(z, Complex::new(5.0, 5.0));
    }

    #[test]
    fn signed_zero_is_preserved() {
        let z = Complex::new(-0.0f32, 0.0);
        assert!(z.is_zero());
        assert!(!z.bits_eq(Complex::zero()));
        assert!(z.conj().im.is_sign_negative());
    }

    #[test]
    fn norm_does_not_overflow() {
        let m = f32::pow2(127);
        assert_eq!(Complex::new(m, m).norm(), m * std::f32::consts::SQRT_2);
    }
}
