//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_usize(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn bool01(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// `sign(x)`: 1 for positive, 0 for zero, -1 for negative.
pub fn sign(x: &Rational) -> Rational {
    if x.is_positive() {
        Rational::one()
    } else if x.is_negative() {
        -Rational::one()
    } else {
        Rational::zero()
    }
}

/// Returns the value as a `usize` when it is a non-negative integer.
pub fn to_index(x: &Rational) -> Option<usize> {
    if !x.is_integer() || x.is_negative() {
        return None;
    }
    usize::try_from(x.to_integer()).ok()
}

/// Parses `-?digits(/digits)?`.
pub fn parse(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num = BigInt::from_str(num).ok()?;
    let den = match den {
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            BigInt::from_str(d).ok()?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Canonical text: `p` for integers, `p/q` otherwise.
pub fn format(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
