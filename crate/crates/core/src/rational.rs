//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p`, `-p` or `p/q` with integer `p`, `q` (q > 0).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den <= BigInt::zero() {
                return None;
            }
            Some(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = text.parse().ok()?;
            Some(BigRational::from_integer(num))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-5"), Some(int(-5)));
        assert_eq!(parse_rational("6/8"), Some(ratio(3, 4)));
        assert_eq!(parse_rational(" -1/2 "), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn display_is_reparseable() {
        for v in [ratio(3, 4), int(-2), ratio(-7, 3), zero()] {
            assert_eq!(parse_rational(&v.to_string()), Some(v));
        }
    }
}
