//! Exact rationals and their textual form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or `"p"` with optional sign. Decimal points and exponents
/// are rejected so that every accepted value is exact.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer = parse_integer(numer).ok_or_else(|| format!("`{text}` is not an exact rational"))?;
    let denom = parse_integer(denom).ok_or_else(|| format!("`{text}` is not an exact rational"))?;
    if denom.is_zero() {
        return Err(format!("`{text}` has a zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Lowest-terms `"p/q"`, always with an explicit denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Short form for human-readable tables: integers print without `/1`.
pub fn display_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format_rational(value)
    }
}

pub fn lcm(values: impl IntoIterator<Item = usize>) -> usize {
    values.into_iter().fold(1, |acc, v| acc.lcm(&v))
}
