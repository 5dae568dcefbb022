//! Hexadecimal floating-point text (`0x1.8p1`, `-0x1p-149`).
//!
//! Formatting always produces the normalized `0x1.<hex>p<exp>` form with
//! trailing zero digits removed, subnormals included, so that parsing the
//! output reproduces the value bit for bit. Parsing also accepts decimal
//! notation and rounds to nearest, ties to even.

use crate::error::{Error, Result};
use crate::real::Real;

pub fn format<T: Real>(v: T) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    let sign = if v.is_sign_negative() { "-" } else { "" };
    if v.is_infinite() {
        return format!("{sign}inf");
    }
    if v == T::zero() {
        return format!("{sign}0x0p0");
    }
    let fb = T::FRACTION_BITS;
    let bits = v.to_bits_u64();
    let frac_mask = (1u64 << fb) - 1;
    let biased = ((bits >> fb) & ((1u64 << (T::WIDTH - 1 - fb)) - 1)) as i32;
    let (exp, frac) = if biased == 0 {
        let frac = bits & frac_mask;
        let top = 63 - frac.leading_zeros();
        let shift = fb - top;
        (T::min_exp() - shift as i32, (frac << shift) & frac_mask)
    } else {
        (biased - T::EXPONENT_BIAS, bits & frac_mask)
    };
    let digits = fb.div_ceil(4);
    let aligned = frac << (digits * 4 - fb);
    let hex = format!("{:0width$x}", aligned, width = digits as usize);
    let hex = hex.trim_end_matches('0');
    if hex.is_empty() {
        format!("{sign}0x1p{exp}")
    } else {
        format!("{sign}0x1.{hex}p{exp}")
    }
}

/// Parses hex-float or decimal text into `T`.
pub fn parse<T: Real>(text: &str) -> Result<T> {
    let s = text.trim();
    let invalid = || Error::InvalidNumber(text.to_string());
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let hex = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X"));
    let Some(hex) = hex else {
        return s.parse::<T>().map_err(|_| invalid());
    };

    let (digits, exp_text) = match hex.find(['p', 'P']) {
        Some(i) => (&hex[..i], Some(&hex[i + 1..])),
        None => (hex, None),
    };
    let binary_exp: i64 = match exp_text {
        Some(e) => e.parse().map_err(|_| invalid())?,
        None => 0,
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }

    let mut mant: u128 = 0;
    let mut exp = binary_exp;
    let mut sticky = false;
    for (i, ch) in int_part.chars().chain(frac_part.chars()).enumerate() {
        let d = ch.to_digit(16).ok_or_else(invalid)? as u128;
        let in_fraction = i >= int_part.len();
        if mant >> 120 == 0 {
            mant = (mant << 4) | d;
            if in_fraction {
                exp -= 4;
            }
        } else {
            sticky |= d != 0;
            if !in_fraction {
                exp += 4;
            }
        }
    }
    let magnitude = round_to::<T>(mant, exp, sticky).ok_or_else(invalid)?;
    Ok(if negative { -magnitude } else { magnitude })
}

/// Rounds `mant * 2^exp` (plus a sticky tail below `mant`) to `T`.
/// Returns `None` on overflow.
fn round_to<T: Real>(mant: u128, exp: i64, sticky: bool) -> Option<T> {
    if mant == 0 {
        return Some(T::zero());
    }
    let fb = T::FRACTION_BITS as i64;
    let top = 127 - mant.leading_zeros() as i64;
    let lead_exp = top + exp;
    // exponent of the last kept bit
    let quantum = (lead_exp - fb).max(T::min_exp() as i64 - fb);
    let shift = quantum - exp;
    let mut sig: u128 = if shift <= 0 {
        mant << (-shift)
    } else if shift >= 128 {
        0
    } else {
        let kept = mant >> shift;
        let rem = mant & ((1u128 << shift) - 1);
        let half = 1u128 << (shift - 1);
        let round_up = rem > half || (rem == half && (sticky || kept & 1 == 1));
        kept + round_up as u128
    };
    let mut quantum = quantum;
    if sig >> (fb + 1) != 0 {
        sig >>= 1;
        quantum += 1;
    }
    if sig >> fb == 0 {
        // subnormal or zero
        return Some(T::from_bits_u64(sig as u64));
    }
    let e = quantum + fb;
    if e > T::max_exp() as i64 {
        return None;
    }
    let biased = (e + T::EXPONENT_BIAS as i64) as u64;
    let frac = (sig as u64) & ((1u64 << fb) - 1);
    Some(T::from_bits_u64((biased << fb) | frac))
}
