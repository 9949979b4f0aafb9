//! Exact rational numbers and their text forms.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// `n / d` as a rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Parses `"-12"`, `"0.9"`, `".5"`, or `"9/10"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let err = || Error::ParseNumber(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_int(num.trim()).ok_or_else(err)?;
        let d = parse_int(den.trim()).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits: String = [whole, frac].concat();
    let numer = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse::<BigInt>().map_err(|_| err())?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `"p/q"`, or just `"p"` for integers.
pub fn format_exact(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal rendering rounded half away from zero to `significant` digits,
/// trailing fractional zeros removed.
pub fn format_decimal(value: &Rational, significant: usize) -> String {
    assert!(significant > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let magnitude = value.abs();
    let ten = BigInt::from(10u32);

    // Smallest e with 10^e <= |x| < 10^(e+1).
    let mut exp =
        magnitude.numer().to_string().len() as i64 - magnitude.denom().to_string().len() as i64;
    let scale = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    while magnitude < scale(exp) {
        exp -= 1;
    }
    while magnitude >= scale(exp + 1) {
        exp += 1;
    }

    let shift = significant as i64 - 1 - exp;
    let scaled = &magnitude * scale(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut digits_int = q;
    if r * BigInt::from(2u32) >= *scaled.denom() {
        digits_int += 1;
    }
    let mut digits = digits_int.to_string();
    if digits.len() > significant {
        // rounding carried into a new leading digit
        digits.truncate(significant);
        exp += 1;
    }

    let mut out = String::new();
    if value.is_negative() {
        out.push('-');
    }
    let sig = significant as i64;
    if exp >= sig - 1 {
        out.push_str(&digits);
        out.extend(core::iter::repeat_n('0', (exp - sig + 1) as usize));
        return out;
    }
    let mut text = if exp >= 0 {
        let (head, tail) = digits.split_at(exp as usize + 1);
        format!("{head}.{tail}")
    } else {
        let zeros: String = "0".repeat((-exp - 1) as usize);
        format!("0.{zeros}{digits}")
    };
    if text.contains('.') {
        while text.ends_with('0') {
            text.pop();
        }
        if text.ends_with('.') {
            text.pop();
        }
    }
    out.push_str(&text);
    out
}

/// Nearest `f64`, for reporting and sampling only.
pub fn to_f64(value: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// Dot product of equally long slices.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn zeros(n: usize) -> Vec<Rational> {
    alloc::vec![Rational::zero(); n]
}
