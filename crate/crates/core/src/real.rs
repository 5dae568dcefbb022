//! Working-precision abstraction over IEEE-754 binary32 and binary64.

use std::fmt::{self, Debug, Display, LowerExp};
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// IEEE-754 interchange format of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Binary32,
    Binary64,
}

impl Precision {
    pub const ALL: [Precision; 2] = [Precision::Binary32, Precision::Binary64];

    pub fn name(self) -> &'static str {
        match self {
            Precision::Binary32 => "binary32",
            Precision::Binary64 => "binary64",
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary32" => Ok(Precision::Binary32),
            "binary64" => Ok(Precision::Binary64),
            other => Err(Error::UnknownPrecision(other.to_string())),
        }
    }
}

/// A binary floating-point format the kernels can run in.
///
/// All constants are derived from the format parameters; nothing is probed
/// at runtime.
pub trait Real:
    Float + Debug + Display + LowerExp + Default + FromStr + Send + Sync + 'static
{
    const PRECISION: Precision;
    /// Explicitly stored fraction bits.
    const FRACTION_BITS: u32;
    /// Total width of the encoding in bits.
    const WIDTH: u32;
    const EXPONENT_BIAS: i32;
    /// Smallest normal number whose reciprocal does not overflow.
    const SFMIN: Self;
    /// `1 / SFMIN`, exact.
    const SFMIN_RECIP: Self;
    /// Unit roundoff, half the gap between 1 and its successor.
    const UNIT_ROUNDOFF: Self;
    /// Largest finite value.
    const OVERFLOW: Self;
    const MIN_SUBNORMAL: Self;

    fn to_bits_u64(self) -> u64;
    fn from_bits_u64(bits: u64) -> Self;
    /// Exact conversion into binary64.
    fn widen(self) -> f64;
    /// Round-to-nearest conversion from binary64.
    fn narrow(v: f64) -> Self;
    /// Whether `a * b` was computed without rounding, given `p = a * b`.
    fn mul_is_exact(a: Self, b: Self, p: Self) -> bool;
    /// Whether `a / b` was computed without rounding, given `q = a / b`.
    fn div_is_exact(a: Self, b: Self, q: Self) -> bool;

    /// Smallest unbiased exponent of a normal number.
    fn min_exp() -> i32 {
        1 - Self::EXPONENT_BIAS
    }

    /// Largest unbiased exponent of a finite number.
    fn max_exp() -> i32 {
        Self::EXPONENT_BIAS
    }

    /// Exact `2^e`; `e` must lie in the representable range.
    fn pow2(e: i32) -> Self {
        let min_sub = Self::min_exp() - Self::FRACTION_BITS as i32;
        assert!(
            (min_sub..=Self::max_exp()).contains(&e),
            "2^{e} is not representable"
        );
        if e >= Self::min_exp() {
            Self::from_bits_u64(((e + Self::EXPONENT_BIAS) as u64) << Self::FRACTION_BITS)
        } else {
            Self::from_bits_u64(1u64 << (e - min_sub))
        }
    }

    /// Builds `±(1 + fraction / 2^FRACTION_BITS) * 2^exp` for a normal exponent.
    fn compose(negative: bool, exp: i32, fraction: u64) -> Self {
        debug_assert!((Self::min_exp()..=Self::max_exp()).contains(&exp));
        let sign = (negative as u64) << (Self::WIDTH - 1);
        let biased = ((exp + Self::EXPONENT_BIAS) as u64) << Self::FRACTION_BITS;
        let frac = fraction & ((1u64 << Self::FRACTION_BITS) - 1);
        Self::from_bits_u64(sign | biased | frac)
    }

    /// Unbiased exponent of a finite nonzero value, normalizing subnormals.
    fn exponent(self) -> i32 {
        let bits = self.to_bits_u64() & !(1u64 << (Self::WIDTH - 1));
        let biased = (bits >> Self::FRACTION_BITS) as i32;
        if biased != 0 {
            return biased - Self::EXPONENT_BIAS;
        }
        let frac = bits & ((1u64 << Self::FRACTION_BITS) - 1);
        let top = 63 - frac.leading_zeros() as i32;
        Self::min_exp() - (Self::FRACTION_BITS as i32 - top)
    }
}

impl Real for f32 {
    const PRECISION: Precision = Precision::Binary32;
    const FRACTION_BITS: u32 = 23;
    const WIDTH: u32 = 32;
    const EXPONENT_BIAS: i32 = 127;
    const SFMIN: f32 = f32::MIN_POSITIVE;
    const SFMIN_RECIP: f32 = 8.507_059e37; // 2^126
    const UNIT_ROUNDOFF: f32 = f32::EPSILON / 2.0;
    const OVERFLOW: f32 = f32::MAX;
    const MIN_SUBNORMAL: f32 = 1.0e-45;

    fn to_bits_u64(self) -> u64 {
        self.to_bits() as u64
    }

    fn from_bits_u64(bits: u64) -> Self {
        f32::from_bits(bits as u32)
    }

    fn widen(self) -> f64 {
        self as f64
    }

    fn narrow(v: f64) -> Self {
        v as f32
    }

    fn mul_is_exact(a: f32, b: f32, p: f32) -> bool {
        // 24x24-bit products fit in binary64
        (a as f64) * (b as f64) == p as f64
    }

    fn div_is_exact(a: f32, b: f32, q: f32) -> bool {
        (q as f64) * (b as f64) == a as f64
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Binary64;
    const FRACTION_BITS: u32 = 52;
    const WIDTH: u32 = 64;
    const EXPONENT_BIAS: i32 = 1023;
    const SFMIN: f64 = f64::MIN_POSITIVE;
    const SFMIN_RECIP: f64 = 4.494_232_837_155_79e307; // 2^1022
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
    const OVERFLOW: f64 = f64::MAX;
    const MIN_SUBNORMAL: f64 = 5.0e-324;

    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }

    fn from_bits_u64(bits: u64) -> Self {
        f64::from_bits(bits)
    }

    fn widen(self) -> f64 {
        self
    }

    fn narrow(v: f64) -> Self {
        v
    }

    fn mul_is_exact(a: f64, b: f64, p: f64) -> bool {
        if a == 0.0 || b == 0.0 || !a.is_finite() || !b.is_finite() {
            return true;
        }
        if !p.is_finite() || p == 0.0 {
            return false;
        }
        // work on significands in [1, 2) so nothing underflows
        let (ea, eb) = (a.exponent(), b.exponent());
        let (ma, mb) = (scale2(a, -ea), scale2(b, -eb));
        let hi = ma * mb;
        ma.mul_add(mb, -hi) == 0.0 && scale2(p, -(ea + eb)) == hi
    }

    fn div_is_exact(a: f64, b: f64, q: f64) -> bool {
        if a == 0.0 || !a.is_finite() || !b.is_finite() || b == 0.0 {
            return true;
        }
        if !q.is_finite() || q == 0.0 {
            return false;
        }
        let (ea, eb, eq) = (a.exponent(), b.exponent(), q.exponent());
        let (ma, mb, mq) = (scale2(a, -ea), scale2(b, -eb), scale2(q, -eq));
        let hi = mq * mb;
        mq.mul_add(mb, -hi) == 0.0 && scale2(ma, ea - eb - eq) == hi
    }
}

/// `v * 2^k` in steps that stay inside the normal exponent range; exact
/// whenever the result is normal.
pub(crate) fn scale2(mut v: f64, mut k: i32) -> f64 {
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        v *= 2f64.powi(step);
        k -= step;
    }
    v
}
