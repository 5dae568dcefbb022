//! Wider-precision quotients and error metrics.

use crate::complex::Complex;
use crate::oracle::dd::DoubleDouble;
use crate::real::{scale2, Real};

/// `(re + i*im) * 2^exp` held in double-double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WideComplex {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
    pub exp: i32,
}

impl WideComplex {
    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.hi() == 0.0 && self.im.hi() == 0.0
    }

    /// Rounds to `T`.
    pub fn round<T: Real>(&self) -> Complex<T> {
        Complex::new(
            T::narrow(scale2(self.re.hi(), self.exp)),
            T::narrow(scale2(self.im.hi(), self.exp)),
        )
    }

    /// `|self|` as a binary64 value; may overflow or underflow.
    pub fn modulus(&self) -> f64 {
        scale2(self.re.hi().hypot(self.im.hi()), self.exp)
    }

    /// Magnitudes of the two parts as binary64 values.
    pub fn part_magnitudes(&self) -> (f64, f64) {
        (
            scale2(self.re.hi().abs(), self.exp),
            scale2(self.im.hi().abs(), self.exp),
        )
    }

    /// `v` rescaled into this value's exponent frame.
    fn frame<T: Real>(&self, v: Complex<T>) -> (DoubleDouble, DoubleDouble) {
        (
            DoubleDouble::from(scale2(v.re.widen(), -self.exp)),
            DoubleDouble::from(scale2(v.im.widen(), -self.exp)),
        )
    }
}

impl<T: Real> From<Complex<T>> for WideComplex {
    fn from(v: Complex<T>) -> Self {
        WideComplex {
            re: DoubleDouble::from(v.re.widen()),
            im: DoubleDouble::from(v.im.widen()),
            exp: 0,
        }
    }
}

/// Formats with a reference quotient accurate well beyond their own
/// precision.
pub trait Reference: Real {
    /// `x / a`, with a relative error far below the unit roundoff of `Self`
    /// in each part.
    fn exact_quotient(x: Complex<Self>, a: Complex<Self>) -> WideComplex;
}

impl Reference for f32 {
    fn exact_quotient(x: Complex<f32>, a: Complex<f32>) -> WideComplex {
        // products of binary32 values are exact in binary64
        let (xr, xi) = (x.re as f64, x.im as f64);
        let (ar, ai) = (a.re as f64, a.im as f64);
        let d = ar.mul_add(ar, ai * ai);
        let nr = xr.mul_add(ar, xi * ai);
        let ni = xi.mul_add(ar, -(xr * ai));
        WideComplex {
            re: DoubleDouble::from(nr / d),
            im: DoubleDouble::from(ni / d),
            exp: 0,
        }
    }
}

impl Reference for f64 {
    fn exact_quotient(x: Complex<f64>, a: Complex<f64>) -> WideComplex {
        let dd = DoubleDouble::from;
        if !x.is_finite() || !a.is_finite() || a.is_zero() {
            let d = a.re * a.re + a.im * a.im;
            return WideComplex {
                re: dd((x.re * a.re + x.im * a.im) / d),
                im: dd((x.im * a.re - x.re * a.im) / d),
                exp: 0,
            };
        }
        if x.is_zero() {
            return WideComplex {
                re: DoubleDouble::ZERO,
                im: DoubleDouble::ZERO,
                exp: 0,
            };
        }
        let top = |v: Complex<f64>| {
            let m = v.re.abs().max(v.im.abs());
            m.exponent()
        };
        let (ex, ea) = (top(x), top(a));
        let (xr, xi) = (dd(scale2(x.re, -ex)), dd(scale2(x.im, -ex)));
        let (ar, ai) = (dd(scale2(a.re, -ea)), dd(scale2(a.im, -ea)));
        let d = ar * ar + ai * ai;
        WideComplex {
            re: (xr * ar + xi * ai) / d,
            im: (xi * ar - xr * ai) / d,
            exp: ex - ea,
        }
    }
}

/// `x / a` evaluated in wider arithmetic and rounded once to `T`.
pub fn exact_reciprocal_scale<T: Reference>(x: Complex<T>, a: Complex<T>) -> Complex<T> {
    T::exact_quotient(x, a).round()
}

/// `|computed - exact| / |exact|`. `None` when `exact` is zero or not finite.
pub fn relative_error<T: Real>(computed: Complex<T>, exact: &WideComplex) -> Option<f64> {
    if exact.is_zero() || !exact.is_finite() {
        return None;
    }
    if !computed.is_finite() {
        return Some(f64::INFINITY);
    }
    let (cr, ci) = exact.frame(computed);
    let (dr, di) = (cr - exact.re, ci - exact.im);
    Some(dr.hi().hypot(di.hi()) / exact.re.hi().hypot(exact.im.hi()))
}

/// Relative error of each part separately. A zero exact part contributes 0 if
/// the computed part is also zero, infinity otherwise.
pub fn relative_error_parts<T: Real>(
    computed: Complex<T>,
    exact: &WideComplex,
) -> Option<(f64, f64)> {
    if exact.is_zero() || !exact.is_finite() {
        return None;
    }
    if !computed.is_finite() {
        return Some((f64::INFINITY, f64::INFINITY));
    }
    let (cr, ci) = exact.frame(computed);
    let part = |c: DoubleDouble, e: DoubleDouble| {
        if e.hi() == 0.0 {
            if c.hi() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            ((c - e).hi() / e.hi()).abs()
        }
    };
    Some((part(cr, exact.re), part(ci, exact.im)))
}

fn ordinal<T: Real>(v: T) -> i128 {
    let sign = 1u64 << (T::WIDTH - 1);
    let bits = v.to_bits_u64();
    let mag = (bits & !sign) as i128;
    if bits & sign != 0 {
        -mag
    } else {
        mag
    }
}

/// Number of representable steps from `p` to `q`; `-0` and `+0` coincide.
/// `None` for NaN, or for nonzero values of opposite sign.
pub fn ulp_distance<T: Real>(p: T, q: T) -> Option<u64> {
    if p.is_nan() || q.is_nan() {
        return None;
    }
    let zero = T::zero();
    if p != zero && q != zero && p.is_sign_negative() != q.is_sign_negative() {
        return None;
    }
    Some((ordinal(p) - ordinal(q)).unsigned_abs() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c<T: Real>(re: T, im: T) -> Complex<T> {
        Complex::new(re, im)
    }

    #[test]
    fn reference_examples() {
        assert_eq!(
            exact_reciprocal_scale(c(25.0f32, 0.0), c(3.0, 4.0)),
            c(3.0, -4.0)
        );
        assert_eq!(
            exact_reciprocal_scale(c(25.0f64, 0.0), c(3.0, 4.0)),
            c(3.0, -4.0)
        );
        assert_eq!(
            exact_reciprocal_scale(c(1.0f32, 0.0), c(1.0, 0.0)),
            c(1.0, 0.0)
        );
        let m = f32::pow2(127);
        assert_eq!(exact_reciprocal_scale(c(m, 0.0), c(m, m)), c(0.5, -0.5));
        let m = f64::pow2(1023);
        assert_eq!(exact_reciprocal_scale(c(m, 0.0), c(m, m)), c(0.5, -0.5));
    }

    #[test]
    fn binary64_reference_spans_the_range() {
        let tiny = f64::MIN_SUBNORMAL;
        let q = f64::exact_quotient(c(1.0, 0.0), c(tiny, 0.0));
        assert_eq!(q.exp, 1074);
        assert!(q.round::<f64>().re.is_infinite());
        let q = exact_reciprocal_scale(c(f64::pow2(-1000), 0.0), c(f64::pow2(1000), 0.0));
        assert_eq!(q, c(0.0, 0.0));
        let q = exact_reciprocal_scale(c(f64::pow2(-500), 0.0), c(f64::pow2(500), 0.0));
        assert_eq!(q.re, f64::pow2(-1000));
    }

    #[test]
    fn relative_error_examples() {
        let exact = WideComplex::from(c(1.0f32, f32::pow2(-24)));
        let e = relative_error(c(1.0f32, 0.0), &exact).unwrap();
        assert!((e - 2f64.powi(-24)).abs() < 1e-12);
        assert_eq!(
            relative_error(c(3.0f32, 1.0), &WideComplex::from(c(3.0f32, 1.0))),
            Some(0.0)
        );
        assert_eq!(
            relative_error(c(1.0f32, 0.0), &WideComplex::from(c(0.0f32, 0.0))),
            None
        );
        assert_eq!(
            relative_error(c(f32::INFINITY, 0.0), &WideComplex::from(c(1.0f32, 0.0))),
            Some(f64::INFINITY)
        );

        let (r, i) = relative_error_parts(c(1.0f32, 0.0), &exact).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(i, 1.0);
    }

    #[test]
    fn ulp_examples() {
        assert_eq!(ulp_distance(1.0f32, 1.0), Some(0));
        assert_eq!(ulp_distance(1.0f32, 1.0 + f32::EPSILON), Some(1));
        assert_eq!(ulp_distance(1.0f32, 1.0 + f32::pow2(-21)), Some(4));
        assert_eq!(ulp_distance(1.0f32, 1.0 + f32::pow2(-22)), Some(2));
        assert_eq!(ulp_distance(-0.0f64, 0.0), Some(0));
        assert_eq!(ulp_distance(0.0f32, f32::MIN_SUBNORMAL), Some(1));
        assert_eq!(ulp_distance(-f32::MIN_SUBNORMAL, 0.0), Some(1));
        assert_eq!(ulp_distance(-1.0f32, 1.0), None);
        assert_eq!(ulp_distance(f32::NAN, 1.0), None);
        assert_eq!(ulp_distance(f64::MAX, f64::INFINITY), Some(1));
    }
}
