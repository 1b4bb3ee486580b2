//! Exact rational arithmetic.
//!
//! Every comparison that decides an election goes through [`Rational`]:
//! thresholds, sybil shares, and ideal points are all kept as reduced
//! numerator/denominator pairs, never floats. Parsing accepts decimal
//! strings ("0.05") and fraction strings ("1/20"); both convert without
//! rounding.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Largest numerator/denominator magnitude accepted from input. Keeps every
/// downstream cross-multiplication within `i128`.
const INPUT_LIMIT: i128 = 1_000_000_000_000_000_000;

/// An exact rational number. `Copy`, always in lowest terms, denominator > 0.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(numer: i128, denom: i128) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::InvalidRational("denominator is zero".into()));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn from_integer(v: i128) -> Self {
        Self(Ratio::from_integer(v))
    }

    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn one_half() -> Self {
        Self(Ratio::new(1, 2))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Lossy view for display and numeric estimation; never used to decide
    /// an outcome.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_component(digits: &str, what: &str) -> Result<i128, Error> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidRational(format!("bad {what}: {digits:?}")));
    }
    let v: i128 = digits
        .parse()
        .map_err(|_| Error::InvalidRational(format!("{what} out of range: {digits}")))?;
    if v > INPUT_LIMIT {
        return Err(Error::InvalidRational(format!("{what} out of range: {digits}")));
    }
    Ok(v)
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"-3"`, `"0.05"`, `".5"`, and `"7/20"`. Decimal input converts
    /// exactly: `0.05` becomes `1/20`, not the nearest float.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i128, rest),
            None => (1i128, s.strip_prefix('+').unwrap_or(s)),
        };
        if body.is_empty() {
            return Err(Error::InvalidRational(s.into()));
        }
        if let Some((n, d)) = body.split_once('/') {
            let numer = parse_component(n, "numerator")?;
            let denom = parse_component(d, "denominator")?;
            if denom == 0 {
                return Err(Error::InvalidRational("denominator is zero".into()));
            }
            return Rational::new(sign * numer, denom);
        }
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let int_val = if int_part.is_empty() && !frac_part.is_empty() {
            0
        } else {
            parse_component(int_part, "integer part")?
        };
        if frac_part.is_empty() {
            return Ok(Rational::from_integer(sign * int_val));
        }
        if frac_part.len() > 18 {
            return Err(Error::InvalidRational(format!(
                "more than 18 decimal places: {s}"
            )));
        }
        let frac_val = parse_component(frac_part, "fractional part")?;
        let scale = 10i128.pow(frac_part.len() as u32);
        if int_val > INPUT_LIMIT / scale {
            return Err(Error::InvalidRational(format!("value out of range: {s}")));
        }
        Rational::new(sign * (int_val * scale + frac_val), scale)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn decimal_strings_convert_exactly() {
        assert_eq!(r("0.05"), Rational::new(1, 20).unwrap());
        assert_eq!(r("0.1"), Rational::new(1, 10).unwrap());
        assert_eq!(r("-1.5"), Rational::new(-3, 2).unwrap());
        assert_eq!(r(".5"), Rational::new(1, 2).unwrap());
        assert_eq!(r("2"), Rational::from_integer(2));
    }

    #[test]
    fn fraction_strings_convert_exactly() {
        assert_eq!(r("1/3"), Rational::new(1, 3).unwrap());
        assert_eq!(r("-7/20"), Rational::new(-7, 20).unwrap());
        assert_eq!(r("4/8"), Rational::new(1, 2).unwrap());
    }

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(r("0.05").to_string(), "1/20");
        assert_eq!(r("2/4").to_string(), "1/2");
        assert_eq!(r("3").to_string(), "3");
        assert_eq!(r("-0.25").to_string(), "-1/4");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1/0", "0.1.2", "a", "1e3", "1/", "/2", "--1"] {
            assert!(bad.parse::<Rational>().is_err(), "accepted {bad:?}");
        }
        // 19 decimal places exceed the input guard.
        assert!("0.1234567890123456789".parse::<Rational>().is_err());
    }

    #[test]
    fn ordering_is_exact() {
        assert!(r("1/3") > r("0.333333333333333333"));
        assert!(r("1/3") < r("0.333333333333333334"));
        assert_eq!(r("10/30"), r("1/3"));
    }

    #[test]
    fn serde_round_trips_as_string() {
        let v = r("-7/20");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"-7/20\"");
        assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), v);
    }
}
