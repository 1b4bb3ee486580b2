//! Single-peaked parameter updates anchored at the current value.
//!
//! Voters declare ideal points on a line; the current value `r` acts as the
//! status quo. The reality-aware median breaks even-count ties in favour of
//! `r`, so a deadlocked electorate leaves the parameter where it is. The
//! suppress-outer rule additionally discards the `floor(sigma * n)` most
//! extreme votes on the side a move would favour, which is what keeps sybil
//! votes from dragging the parameter past the genuine median.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::Rational;
use crate::proposal::min_safe_delta;
use crate::threshold::{strict_supermajority, SigmaBound};

/// The current value and one declared ideal point per agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterProfile {
    pub reality: Rational,
    pub ideals: Vec<Rational>,
}

impl ParameterProfile {
    pub fn new(reality: Rational, ideals: Vec<Rational>) -> Self {
        Self { reality, ideals }
    }

    pub fn len(&self) -> u64 {
        self.ideals.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }
}

/// Median of `values` when their count is odd; with an even count, the
/// median of `values` plus `r`, which lands on `r` itself whenever `r` lies
/// between the two middle values.
pub fn reality_aware_median(values: &[Rational], r: Rational) -> Result<Rational, Error> {
    if values.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    if n % 2 == 1 {
        return Ok(sorted[n / 2]);
    }
    let lo = sorted[n / 2 - 1];
    let hi = sorted[n / 2];
    Ok(if r <= lo {
        lo
    } else if r >= hi {
        hi
    } else {
        r
    })
}

/// Which side of the current value the band extends to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Stay,
}

/// The vote values lying between the current value and the reality-aware
/// median, inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianBand {
    pub reality: Rational,
    pub v_star: Rational,
    pub direction: Direction,
    /// Distinct vote values inside the band, ascending.
    pub members: Vec<Rational>,
}

impl MedianBand {
    /// Safety test for an update `o`: the status quo itself, or a value the
    /// band covers, strictly past `r` but not past the median.
    pub fn admits(&self, o: Rational) -> bool {
        o == self.reality
            || (self.reality < o && o <= self.v_star)
            || (self.v_star <= o && o < self.reality)
    }
}

/// The baseline parameter rule: everything between the current value and
/// the reality-aware median is an acceptable update.
pub fn median_base_rule(profile: &ParameterProfile) -> Result<MedianBand, Error> {
    let r = profile.reality;
    let v_star = reality_aware_median(&profile.ideals, r)?;
    let (lo, hi) = if r <= v_star { (r, v_star) } else { (v_star, r) };
    let mut members: Vec<Rational> = profile
        .ideals
        .iter()
        .copied()
        .filter(|v| lo <= *v && *v <= hi)
        .collect();
    members.sort_unstable();
    members.dedup();
    let direction = match v_star.cmp(&r) {
        Ordering::Greater => Direction::Up,
        Ordering::Less => Direction::Down,
        Ordering::Equal => Direction::Stay,
    };
    Ok(MedianBand {
        reality: r,
        v_star,
        direction,
        members,
    })
}

/// Moves to the nearest ideal point past `r`, but only when a strict
/// `(1/2 + sigma/2)` supermajority wants to move that way.
pub fn simple_update(profile: &ParameterProfile, sigma: SigmaBound) -> Result<Rational, Error> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let r = profile.reality;
    let n = profile.len();
    let delta = min_safe_delta(sigma);
    let above = profile.ideals.iter().filter(|v| **v > r).count() as u64;
    let below = profile.ideals.iter().filter(|v| **v < r).count() as u64;
    if strict_supermajority(above, n, delta)? {
        Ok(*profile.ideals.iter().filter(|v| **v > r).min().unwrap())
    } else if strict_supermajority(below, n, delta)? {
        Ok(*profile.ideals.iter().filter(|v| **v < r).max().unwrap())
    } else {
        Ok(r)
    }
}

/// The vote list with its `floor(sigma * n)` largest, respectively
/// smallest, entries removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuppressedSets {
    /// Sorted votes with the bottom `removed_count` entries dropped.
    pub lower_trimmed: Vec<Rational>,
    /// Sorted votes with the top `removed_count` entries dropped.
    pub upper_trimmed: Vec<Rational>,
    pub removed_count: usize,
}

fn floor_sigma_n(sigma: SigmaBound, n: usize) -> usize {
    let a = sigma.value().numer();
    let b = sigma.value().denom();
    ((a * n as i128).div_euclid(b)) as usize
}

/// Removes exactly `floor(sigma * n)` votes from each end of the sorted
/// list, counting duplicates as separate votes.
pub fn suppressed_sets(values: &[Rational], sigma: SigmaBound) -> Result<SuppressedSets, Error> {
    let n = values.len();
    let removed = floor_sigma_n(sigma, n);
    if removed >= n {
        return Err(Error::SuppressionRemovesAll);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    Ok(SuppressedSets {
        lower_trimmed: sorted[removed..].to_vec(),
        upper_trimmed: sorted[..n - removed].to_vec(),
        removed_count: removed,
    })
}

/// Like the median rule, but the median that authorizes an upward move is
/// recomputed without the top `floor(sigma * n)` votes (downward: without
/// the bottom ones). A supporting bloc that survives its own trimming is
/// genuine enough to move the parameter.
pub fn suppress_outer_sigma(
    profile: &ParameterProfile,
    sigma: SigmaBound,
) -> Result<Rational, Error> {
    let r = profile.reality;
    let trimmed = suppressed_sets(&profile.ideals, sigma)?;
    let v_star = reality_aware_median(&profile.ideals, r)?;
    let up = reality_aware_median(&trimmed.upper_trimmed, r)?;
    let down = reality_aware_median(&trimmed.lower_trimmed, r)?;
    Ok(if r < up && up <= v_star {
        up
    } else if v_star <= down && down < r {
        down
    } else {
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn vals(xs: &[i128]) -> Vec<Rational> {
        xs.iter().map(|x| Rational::from_integer(*x)).collect()
    }

    fn profile(xs: &[i128], r: i128) -> ParameterProfile {
        ParameterProfile::new(Rational::from_integer(r), vals(xs))
    }

    fn sig(s: &str) -> SigmaBound {
        s.parse().unwrap()
    }

    #[test]
    fn odd_count_is_the_plain_median() {
        assert_eq!(
            reality_aware_median(&vals(&[1, 3, 5]), q("0")).unwrap(),
            q("3")
        );
    }

    #[test]
    fn even_count_breaks_ties_toward_reality() {
        assert_eq!(reality_aware_median(&vals(&[1, 3]), q("2")).unwrap(), q("2"));
        assert_eq!(reality_aware_median(&vals(&[1, 3]), q("5")).unwrap(), q("3"));
        assert_eq!(reality_aware_median(&vals(&[1, 3]), q("0")).unwrap(), q("1"));
    }

    #[test]
    fn empty_values_are_an_error() {
        assert_eq!(
            reality_aware_median(&[], q("0")),
            Err(Error::EmptyProfile)
        );
    }

    /// Independent reference: insert r, take the middle of the odd list.
    fn insert_median(values: &[Rational], r: Rational) -> Rational {
        let mut all = values.to_vec();
        all.push(r);
        all.sort_unstable();
        all[all.len() / 2]
    }

    proptest! {
        #[test]
        fn even_case_equals_median_with_reality_inserted(
            raw in proptest::collection::vec(-5i128..=5, 1..9),
            r in -5i128..=5,
        ) {
            let values = vals(&raw);
            let r = Rational::from_integer(r);
            let got = reality_aware_median(&values, r).unwrap();
            if raw.len() % 2 == 0 {
                prop_assert_eq!(got, insert_median(&values, r));
            } else {
                let mut sorted = values.clone();
                sorted.sort_unstable();
                prop_assert_eq!(got, sorted[sorted.len() / 2]);
            }
        }
    }

    #[test]
    fn band_holds_votes_between_reality_and_median() {
        let band = median_base_rule(&profile(&[1, 2, 3], 0)).unwrap();
        assert_eq!(band.v_star, q("2"));
        assert_eq!(band.members, vals(&[1, 2]));
        assert_eq!(band.direction, Direction::Up);

        let band = median_base_rule(&profile(&[1, 2, 3], 2)).unwrap();
        assert_eq!(band.members, vals(&[2]));
        assert_eq!(band.direction, Direction::Stay);

        let band = median_base_rule(&profile(&[5, 6, 9, 9], 4)).unwrap();
        assert_eq!(band.v_star, q("6"));
        assert_eq!(band.members, vals(&[5, 6]));
    }

    #[test]
    fn band_points_down_when_votes_sit_below_reality() {
        let band = median_base_rule(&profile(&[1, 2, 3], 4)).unwrap();
        assert_eq!(band.v_star, q("2"));
        assert_eq!(band.direction, Direction::Down);
        assert_eq!(band.members, vals(&[2, 3]));
        assert!(band.admits(q("3")) && band.admits(q("2")) && band.admits(q("4")));
        assert!(!band.admits(q("1")) && !band.admits(q("5")));
    }

    #[test]
    fn simple_update_moves_to_nearest_point() {
        assert_eq!(simple_update(&profile(&[2, 3, 4], 1), sig("0")).unwrap(), q("2"));
        assert_eq!(simple_update(&profile(&[0, 2], 1), sig("0")).unwrap(), q("1"));
        // 3 of 4 above r clears 1/2 + 1/10.
        assert_eq!(
            simple_update(&profile(&[2, 2, 3, 0], 1), sig("1/5")).unwrap(),
            q("2")
        );
        assert_eq!(simple_update(&profile(&[0, 0, 1], 2), sig("0")).unwrap(), q("1"));
    }

    #[test]
    fn suppression_removes_by_count_not_value() {
        let s = suppressed_sets(&vals(&[9, 1, 9, 2]), sig("1/4")).unwrap();
        assert_eq!(s.upper_trimmed, vals(&[1, 2, 9]));
        assert_eq!(s.lower_trimmed, vals(&[2, 9, 9]));
        assert_eq!(s.removed_count, 1);
    }

    #[test]
    fn zero_sigma_suppression_is_identity() {
        let s = suppressed_sets(&vals(&[3, 1, 2]), sig("0")).unwrap();
        assert_eq!(s.upper_trimmed, vals(&[1, 2, 3]));
        assert_eq!(s.lower_trimmed, vals(&[1, 2, 3]));
        assert_eq!(s.removed_count, 0);
    }

    #[test]
    fn suppression_count_is_floored() {
        let ten = vals(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let s = suppressed_sets(&ten, sig("0.19")).unwrap();
        assert_eq!(s.removed_count, 1);
        assert_eq!(s.upper_trimmed.len(), 9);
    }

    #[test]
    fn full_suppression_is_an_error() {
        assert_eq!(
            suppressed_sets(&vals(&[1, 2]), sig("1")),
            Err(Error::SuppressionRemovesAll)
        );
        assert_eq!(
            suppressed_sets(&[], sig("0")),
            Err(Error::SuppressionRemovesAll)
        );
    }

    #[test]
    fn suppress_outer_moves_to_trimmed_median() {
        let p = profile(&[1, 1, 1, 1, 2, 2, 9, 9, 9, 9], 0);
        assert_eq!(suppress_outer_sigma(&p, sig("1/5")).unwrap(), q("1"));
    }

    #[test]
    fn suppress_outer_fixed_point_at_reality() {
        let p = profile(&[4, 4, 4], 4);
        assert_eq!(suppress_outer_sigma(&p, sig("1/4")).unwrap(), q("4"));
    }

    #[test]
    fn unanimous_bloc_survives_its_own_trimming() {
        for n in 1..=8usize {
            let p = ParameterProfile::new(q("3"), vec![q("7"); n]);
            assert_eq!(suppress_outer_sigma(&p, sig("3/10")).unwrap(), q("7"), "n={n}");
        }
    }

    #[test]
    fn suppress_outer_moves_down_symmetrically() {
        let p = profile(&[0, 0, 0, 5], 4);
        assert_eq!(suppress_outer_sigma(&p, sig("1/4")).unwrap(), q("0"));
    }

    #[test]
    fn update_stays_put_without_a_majority_past_reality() {
        // Two votes straddling r: no side has a supermajority.
        let p = ParameterProfile::new(q("1.5"), vec![q("2.0"), q("0.5")]);
        assert_eq!(suppress_outer_sigma(&p, sig("0.1")).unwrap(), q("1.5"));
        assert_eq!(simple_update(&p, sig("0.1")).unwrap(), q("1.5"));
    }

    proptest! {
        // The suppress-outer result never leaves the genuine-deciding band:
        // it is r or lies strictly past r but never past the full median.
        #[test]
        fn output_is_reality_or_inside_the_band(
            raw in proptest::collection::vec(0i128..=4, 1..9),
            r in 0i128..=4,
            s in 0u32..3,
        ) {
            let sigma = sig(["0", "1/8", "1/4"][s as usize]);
            let p = profile(&raw, r);
            let out = suppress_outer_sigma(&p, sigma).unwrap();
            let band = median_base_rule(&p).unwrap();
            prop_assert!(band.admits(out));
        }

        // Dominance: suppress-outer never lands short of the simple rule.
        #[test]
        fn suppress_outer_reaches_at_least_as_far_as_simple(
            raw in proptest::collection::vec(0i128..=4, 1..9),
            r in 0i128..=4,
            s in 0u32..3,
        ) {
            let sigma = sig(["0", "1/8", "1/4"][s as usize]);
            let p = profile(&raw, r);
            let simple = simple_update(&p, sigma).unwrap();
            let outer = suppress_outer_sigma(&p, sigma).unwrap();
            let r = p.reality;
            prop_assert!(
                (r <= simple && simple <= outer) || (outer <= simple && simple <= r),
                "simple {simple} outside [r={r}, outer={outer}]"
            );
        }
    }
}
