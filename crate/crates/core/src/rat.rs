//! Exact rational helpers: parsing, formatting, JSON forms and accurate
//! float conversion.
//!
//! Rationals travel through text and JSON as `"p/q"` strings (or plain
//! integers / decimal literals); all arithmetic stays in `BigRational`.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Parses `"p/q"`, integer, or decimal (`-1.96`, `2.5e3`) literals exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidRational(text.to_string()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidRational(text.to_string()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::InvalidRational(text.to_string()))?;
        if d.is_zero() {
            return Err(Error::InvalidRational(text.to_string()));
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| Error::InvalidRational(text.to_string()))
}

/// Exact value of a decimal literal with optional exponent, e.g. `-1.96e-2`.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().ok()?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{}{}", int_part.trim_start_matches(['+', '-']), frac_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    if int_part.starts_with('-') {
        value = -value;
    }
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    if shift >= 0 {
        value *= BigRational::from_integer(ten.pow(shift as u32));
    } else {
        value /= BigRational::from_integer(ten.pow((-shift) as u32));
    }
    Some(value)
}

/// Canonical `"p/q"` form (plain `"p"` when the denominator is 1).
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Reads a rational out of a JSON value: `"3/2"`, `"1.5"`, `3`, or `1.5`.
pub fn rational_from_json(value: &serde_json::Value) -> Result<BigRational> {
    match value {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::InvalidRational(other.to_string())),
    }
}

/// Accurate rational-to-f64 conversion.
///
/// Divides at 64 extra bits of precision before rounding, so the result is
/// correct to the last ulp even when numerator and denominator separately
/// overflow f64. Infinite for magnitudes beyond the f64 range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let negative = q.is_negative();
    let num = q.numer().abs().to_biguint().expect("abs is nonnegative");
    let den = q.denom().abs().to_biguint().expect("abs is nonnegative");
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let scaled = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    // scaled ~ 2^64, always fits an f64 after the power-of-two rescale
    let mantissa = scaled.to_f64().unwrap_or(f64::INFINITY);
    let magnitude = mantissa * (-shift as f64).exp2();
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// Natural log of a positive rational, robust to values far outside f64 range.
pub fn ln_rational(q: &BigRational) -> f64 {
    assert!(q.is_positive(), "ln of a nonpositive rational");
    ln_biguint(&q.numer().to_biguint().expect("positive numerator"))
        - ln_biguint(&q.denom().to_biguint().expect("positive denominator"))
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        return (n.to_f64().expect("fits f64")).ln();
    }
    let top = (n >> (bits - 53)).to_f64().expect("53 bits fit f64");
    top.ln() + (bits - 53) as f64 * std::f64::consts::LN_2
}

/// Exact `base^(u/v)` for a positive integer base and positive rational
/// exponent, when the result is rational; `None` otherwise.
pub fn integer_rational_power(base: u64, exponent: &BigRational) -> Option<BigRational> {
    let u = exponent.numer().to_u32()?;
    let v = exponent.denom().to_u32()?;
    let powered = BigUint::from(base).pow(u);
    if v == 1 {
        return Some(BigRational::from_integer(BigInt::from(powered)));
    }
    let root = num_integer::Roots::nth_root(&powered, v);
    if num_traits::Pow::pow(root.clone(), v) == powered {
        Some(BigRational::from_integer(BigInt::from_biguint(
            Sign::Plus,
            root,
        )))
    } else {
        None
    }
}

/// Exact square root of a nonnegative rational, when one exists.
pub fn sqrt_exact(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let num = q.numer().to_biguint()?;
    let den = q.denom().to_biguint()?;
    let num_root = num.sqrt();
    let den_root = den.sqrt();
    if &num_root * &num_root == num && &den_root * &den_root == den {
        Some(BigRational::new(
            BigInt::from_biguint(Sign::Plus, num_root),
            BigInt::from_biguint(Sign::Plus, den_root),
        ))
    } else {
        None
    }
}

pub fn big_rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
