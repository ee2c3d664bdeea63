//! Thin helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^k as a big integer.
pub fn pow2(k: u64) -> BigInt {
    BigInt::one() << usize::try_from(k).expect("exponent fits usize")
}

/// Smallest integer >= r.
pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Largest integer <= r.
pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Parses "n" or "n/d" with optional leading sign on the numerator.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Domain(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Domain(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Formats as "n" for integers and "n/d" otherwise (normalized, d > 0).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Approximate magnitude in bits of num/den, for size diagnostics.
pub fn approx_bits(r: &Rational) -> u64 {
    (r.numer().abs().bits()).max(r.denom().bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        for (s, norm) in [
            ("3", "3"),
            ("-4/2", "-2"),
            ("1/10", "1/10"),
            ("-7/3", "-7/3"),
            ("7/-3", "-7/3"),
        ] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), norm);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(ceil_int(&rat(5, 2)), BigInt::from(3));
        assert_eq!(ceil_int(&rat(-5, 2)), BigInt::from(-2));
        assert_eq!(floor_int(&rat(5, 2)), BigInt::from(2));
        assert_eq!(ceil_int(&rat_int(4)), BigInt::from(4));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(0), BigInt::one());
        assert_eq!(pow2(10), BigInt::from(1024));
    }
}
