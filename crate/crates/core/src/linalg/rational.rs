//! Exact rational scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a positive
//! denominator. Scalars arrive from files and subprocesses as integers (`"-7"`), decimals
//! (`"0.6"`, `"1.5e-2"`) or fractions (`"3/5"`); all three are converted without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses an integer, decimal or `a/b` string exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let numer = parse_integer(num.trim(), text)?;
        let denom = parse_integer(den.trim(), text)?;
        if denom.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(numer, denom));
    }
    parse_decimal(s, text)
}

fn parse_integer(s: &str, original: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid scalar {original:?}")));
    }
    digits
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("invalid scalar {original:?}")))
}

fn parse_decimal(s: &str, original: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid scalar {original:?}"));
    let (negative, unsigned) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match unsigned.find(['e', 'E']) {
        Some(pos) => {
            let exp_text = &unsigned[pos + 1..];
            let exp_body = exp_text
                .strip_prefix('-')
                .or_else(|| exp_text.strip_prefix('+'))
                .unwrap_or(exp_text);
            if exp_body.is_empty() || !exp_body.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let exp: i64 = exp_text.parse().map_err(|_| bad())?;
            (&unsigned[..pos], exp)
        }
        None => (unsigned, 0),
    };
    let (whole, fractional) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && fractional.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(fractional.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exponent.unsigned_abs() > 10_000 {
        return Err(Error::Parse(format!("exponent out of range in {original:?}")));
    }
    let digits = format!("{whole}{fractional}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - fractional.len() as i64;
    let ten = BigInt::from(10);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        Rational::from_integer(numer * power)
    } else {
        Rational::new(numer, power)
    })
}

/// Canonical text form: `"a"` for integers, `"a/b"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub(crate) fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// `|value|^exponent`, exact.
pub(crate) fn abs_pow(value: &Rational, exponent: u32) -> Rational {
    num_traits::pow(value.abs(), exponent as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_scalar_forms() {
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.6").unwrap(), frac(3, 5));
        assert_eq!(parse_rational("3/5").unwrap(), frac(3, 5));
        assert_eq!(parse_rational("6/10").unwrap(), frac(3, 5));
        assert_eq!(parse_rational("-2/-4").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("1.5e-2").unwrap(), frac(3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), int(2000));
        assert_eq!(parse_rational(".25").unwrap(), frac(1, 4));
        assert_eq!(parse_rational("-0.70").unwrap(), frac(-7, 10));
        assert_eq!(parse_rational("+4").unwrap(), int(4));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "--1", "1e", "3/", "/3", ".", "1/2/3", "0x10"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_rational(&frac(17, 20)), "17/20");
        assert_eq!(format_rational(&frac(12, 2)), "6");
        assert_eq!(format_rational(&frac(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(0)), "0");
    }
}
