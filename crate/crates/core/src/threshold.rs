//! Supermajority thresholds over exact vote counts.
//!
//! A margin `d` turns "majority" into "strictly more than a (1/2 + d)
//! fraction". Head-to-head contests use the strict form; viability against
//! the status quo uses the weak "at least" form. The two differ exactly on
//! profiles that sit on the threshold, and that difference is deliberate:
//! callers record it via [`at_exact_threshold`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::Rational;

/// Supermajority margin, a rational in `[0, 1/2]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Delta(Rational);

impl Delta {
    pub fn new(value: Rational) -> Result<Self, Error> {
        if value.is_negative() || value > Rational::one_half() {
            return Err(Error::DeltaOutOfRange(value.to_string()));
        }
        Ok(Self(value))
    }

    pub fn zero() -> Self {
        Self(Rational::zero())
    }

    pub fn value(&self) -> Rational {
        self.0
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Delta({})", self.0)
    }
}

impl FromStr for Delta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Delta::new(s.parse()?)
    }
}

/// Fraction of the electorate assumed (or known) to be fake identities,
/// a rational in `[0, 1]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SigmaBound(Rational);

impl SigmaBound {
    pub fn new(value: Rational) -> Result<Self, Error> {
        if value.is_negative() || value > Rational::one() {
            return Err(Error::SigmaOutOfRange(value.to_string()));
        }
        Ok(Self(value))
    }

    pub fn zero() -> Self {
        Self(Rational::zero())
    }

    pub fn value(&self) -> Rational {
        self.0
    }
}

impl fmt::Display for SigmaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for SigmaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaBound({})", self.0)
    }
}

impl FromStr for SigmaBound {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        SigmaBound::new(s.parse()?)
    }
}

fn check_counts(count_for: u64, total: u64) -> Result<(), Error> {
    if total == 0 {
        return Err(Error::EmptyElectorate);
    }
    if count_for > total {
        return Err(Error::CountExceedsTotal {
            count: count_for,
            total,
        });
    }
    Ok(())
}

// count/total > 1/2 + a/b  <=>  2*b*count > total*(b + 2a), all in i128.
// Inputs are bounded (counts <= u64, b <= 10^18 from parsing), so the
// products stay well inside i128.
fn cross(count: u64, total: u64, margin: Delta) -> (i128, i128) {
    let a = margin.value().numer();
    let b = margin.value().denom();
    (2 * b * count as i128, total as i128 * (b + 2 * a))
}

/// True when strictly more than a `(1/2 + margin)` fraction of `total`
/// voted for.
pub fn strict_supermajority(count_for: u64, total: u64, margin: Delta) -> Result<bool, Error> {
    check_counts(count_for, total)?;
    let (lhs, rhs) = cross(count_for, total, margin);
    Ok(lhs > rhs)
}

/// True when at least a `(1/2 + margin)` fraction of `total` voted for.
pub fn weak_supermajority(count_for: u64, total: u64, margin: Delta) -> Result<bool, Error> {
    check_counts(count_for, total)?;
    let (lhs, rhs) = cross(count_for, total, margin);
    Ok(lhs >= rhs)
}

/// True when the support sits exactly on the threshold, i.e. the weak test
/// passes while the strict one fails.
pub fn at_exact_threshold(count_for: u64, total: u64, margin: Delta) -> bool {
    let (lhs, rhs) = cross(count_for, total, margin);
    lhs == rhs
}

/// Smallest count that clears the strict test. May exceed `total`, meaning
/// no achievable count clears it.
pub fn strict_min_count(total: u64, margin: Delta) -> u64 {
    let a = margin.value().numer();
    let b = margin.value().denom();
    let num = total as i128 * (b + 2 * a);
    (num.div_euclid(2 * b) + 1) as u64
}

/// Smallest count that clears the weak test.
pub fn weak_min_count(total: u64, margin: Delta) -> u64 {
    let a = margin.value().numer();
    let b = margin.value().denom();
    let num = total as i128 * (b + 2 * a);
    let den = 2 * b;
    ((num + den - 1).div_euclid(den)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn m(s: &str) -> Delta {
        s.parse().unwrap()
    }

    /// Arbitrary-precision reference for the strict test.
    fn oracle_strict(count: u64, total: u64, margin: Delta) -> bool {
        let frac = BigRational::new(BigInt::from(count), BigInt::from(total));
        let thr = BigRational::new(BigInt::from(1), BigInt::from(2))
            + BigRational::new(
                BigInt::from(margin.value().numer()),
                BigInt::from(margin.value().denom()),
            );
        frac > thr
    }

    #[test]
    fn sixth_margin_example() {
        // 13 of 19 against 1/2 + 1/6: 13*6 = 78 > 19*4 = 76.
        assert!(strict_supermajority(13, 19, m("1/6")).unwrap());
        assert!(oracle_strict(13, 19, m("1/6")));
    }

    #[test]
    fn bare_majority_is_not_strict() {
        assert!(!strict_supermajority(5, 10, Delta::zero()).unwrap());
        assert!(strict_supermajority(6, 10, Delta::zero()).unwrap());
        assert!(weak_supermajority(5, 10, Delta::zero()).unwrap());
        assert!(at_exact_threshold(5, 10, Delta::zero()));
    }

    #[test]
    fn half_margin_requires_unanimity() {
        let half = m("1/2");
        assert!(!strict_supermajority(9, 10, half).unwrap());
        // Even unanimity is only "at least", never "strictly more".
        assert!(!strict_supermajority(10, 10, half).unwrap());
        assert!(weak_supermajority(10, 10, half).unwrap());
    }

    #[test]
    fn empty_total_is_an_error() {
        assert_eq!(
            strict_supermajority(0, 0, Delta::zero()),
            Err(Error::EmptyElectorate)
        );
    }

    #[test]
    fn count_above_total_is_an_error() {
        assert!(matches!(
            strict_supermajority(11, 10, Delta::zero()),
            Err(Error::CountExceedsTotal { .. })
        ));
    }

    #[test]
    fn min_counts_bracket_the_thresholds() {
        // n=12, margin 1/6: threshold count is 8, strict needs 9, weak 8.
        assert_eq!(strict_min_count(12, m("1/6")), 9);
        assert_eq!(weak_min_count(12, m("1/6")), 8);
        // n=19, margin 1/6: 19*(2/3) = 12.67, strict and weak both need 13.
        assert_eq!(strict_min_count(19, m("1/6")), 13);
        assert_eq!(weak_min_count(19, m("1/6")), 13);
    }

    #[test]
    fn margin_bounds_are_enforced() {
        assert!(Delta::new("1/2".parse().unwrap()).is_ok());
        assert!(Delta::new("0.51".parse().unwrap()).is_err());
        assert!(Delta::new("-0.1".parse().unwrap()).is_err());
        assert!(SigmaBound::new("1".parse().unwrap()).is_ok());
        assert!(SigmaBound::new("1.01".parse().unwrap()).is_err());
    }

    proptest! {
        // Agreement with arbitrary-precision arithmetic across the input
        // range the library promises to handle exactly.
        #[test]
        fn matches_bigint_oracle(
            total in 1u64..1_000_000_000,
            count_frac in 0.0f64..=1.0,
            num in 0i128..=500,
            den in 1000i128..1_000_000,
        ) {
            let count = ((total as f64) * count_frac) as u64;
            let count = count.min(total);
            let margin = Delta::new(Rational::new(num, den).unwrap()).unwrap();
            prop_assert_eq!(
                strict_supermajority(count, total, margin).unwrap(),
                oracle_strict(count, total, margin)
            );
        }

        // Exact-boundary inputs, where floating point would get it wrong.
        #[test]
        fn exact_boundaries_fail_strict_and_pass_weak(k in 1u64..10_000, b in 1i128..500) {
            // count/total == 1/2 + 1/(2b) exactly: total = 2bk, count = bk + k.
            let total = 2 * b as u64 * k;
            let count = b as u64 * k + k;
            let margin = Delta::new(Rational::new(1, 2 * b).unwrap()).unwrap();
            prop_assert!(!strict_supermajority(count, total, margin).unwrap());
            prop_assert!(weak_supermajority(count, total, margin).unwrap());
            prop_assert!(at_exact_threshold(count, total, margin));
            prop_assert_eq!(weak_min_count(total, margin), count);
            prop_assert_eq!(strict_min_count(total, margin), count + 1);
        }

        #[test]
        fn monotone_in_count(total in 1u64..10_000, count in 0u64..10_000, num in 0i128..=1, den in 2i128..100) {
            let count = count.min(total);
            let margin = Delta::new(Rational::new(num, den).unwrap()).unwrap();
            if strict_supermajority(count, total, margin).unwrap() && count < total {
                prop_assert!(strict_supermajority(count + 1, total, margin).unwrap());
            }
        }
    }
}
