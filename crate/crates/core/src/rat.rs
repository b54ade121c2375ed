//! Exact rational arithmetic helpers.
//!
//! Every probability in this crate is a [`BigRational`]; nothing is ever
//! rounded. Rationals cross the file-format boundary as `"p/q"` strings
//! (a bare `"p"` is accepted on input and means `p/1`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Error parsing a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatParseError {
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parse a rational from `"p/q"` or `"p"`.
pub fn parse_ratio(s: &str) -> Result<BigRational, RatParseError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| RatParseError::Invalid(s.to_string()))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| RatParseError::Invalid(s.to_string()))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(RatParseError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(n, d))
}

/// Format a rational as `"p/q"` (integers render without the `/q` part).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a/b` from machine integers, for fixture tables.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn rat_zero() -> BigRational {
    BigRational::zero()
}

pub fn rat_one() -> BigRational {
    BigRational::one()
}

/// Sum of a slice of rationals.
pub fn rat_sum<'a>(items: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    items.into_iter().fold(BigRational::zero(), |a, b| a + b)
}

pub fn is_probability(r: &BigRational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer() {
        assert_eq!(parse_ratio("2/5").unwrap(), ratio(2, 5));
        assert_eq!(parse_ratio("1").unwrap(), ratio(1, 1));
        assert_eq!(parse_ratio(" -3/9 ").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(matches!(parse_ratio("1/0"), Err(RatParseError::ZeroDenominator(_))));
        assert!(matches!(parse_ratio("a/b"), Err(RatParseError::Invalid(_))));
        assert!(matches!(parse_ratio(""), Err(RatParseError::Invalid(_))));
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format_ratio(&ratio(2, 4)), "1/2");
        assert_eq!(format_ratio(&ratio(3, 1)), "3");
        assert_eq!(format_ratio(&ratio(0, 7)), "0");
    }
}
