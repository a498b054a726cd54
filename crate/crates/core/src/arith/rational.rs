//! Exact rationals.
//!
//! The coefficient field is `num_rational::BigRational`; this module only adds
//! the handful of constructors and predicates the rest of the crate leans on.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

#[inline]
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[inline]
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Parse `-3`, `5/7`, `12`. Denominator zero is rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// `base^exp` for possibly negative `exp`; `None` when inverting zero.
pub fn pow_signed(base: &Rational, exp: i64) -> Option<Rational> {
    if exp >= 0 {
        Some(num_traits::pow(base.clone(), exp as usize))
    } else if base.is_zero() {
        None
    } else {
        Some(num_traits::pow(base.recip(), exp.unsigned_abs() as usize))
    }
}

/// Small-integer view, used for exponents and bounds read from text.
pub fn to_i64(r: &Rational) -> Option<i64> {
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("-3"), Some(int(-3)));
        assert_eq!(parse_rational("10/14"), Some(ratio(5, 7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = ratio(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn signed_powers() {
        assert_eq!(pow_signed(&int(2), -2), Some(ratio(1, 4)));
        assert_eq!(pow_signed(&int(0), -1), None);
        assert_eq!(pow_signed(&ratio(2, 3), 3), Some(ratio(8, 27)));
    }
}
