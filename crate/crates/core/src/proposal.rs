//! Single-proposal elections: proposal against status quo.
//!
//! The `d`-supermajority rule adopts the proposal only on a strict
//! `(1/2 + d)` supermajority; every tie or sub-threshold tally keeps the
//! status quo. Running it with `d = sigma/2` is the smallest margin that is
//! safe against a sybil share of `sigma`, at the price of demanding a larger
//! genuine majority.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::Rational;
use crate::outcome::{AltId, Contest, ContestStage, DecisionOutcome};
use crate::threshold::{at_exact_threshold, strict_supermajority, Delta, SigmaBound};

/// One binary ballot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryVote {
    Proposal,
    Reality,
}

/// All binary ballots of an election, one per agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryProfile {
    votes: Vec<BinaryVote>,
}

impl BinaryProfile {
    pub fn new(votes: Vec<BinaryVote>) -> Self {
        Self { votes }
    }

    pub fn from_counts(proposal: u64, reality: u64) -> Self {
        let mut votes = vec![BinaryVote::Proposal; proposal as usize];
        votes.extend(std::iter::repeat(BinaryVote::Reality).take(reality as usize));
        Self { votes }
    }

    pub fn len(&self) -> u64 {
        self.votes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    pub fn proposal_count(&self) -> u64 {
        self.votes
            .iter()
            .filter(|v| **v == BinaryVote::Proposal)
            .count() as u64
    }

    pub fn votes(&self) -> &[BinaryVote] {
        &self.votes
    }
}

/// Adopt the proposal on a strict `(1/2 + delta)` supermajority, else keep
/// the status quo.
pub fn supermajority_rule(profile: &BinaryProfile, delta: Delta) -> Result<DecisionOutcome, Error> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let support = profile.proposal_count();
    let total = profile.len();
    let cleared = strict_supermajority(support, total, delta)?;
    let contest = Contest {
        challenger: AltId::proposal(),
        defender: AltId::reality(),
        support,
        total,
        delta: delta.value(),
        weak: false,
        cleared,
        at_threshold: at_exact_threshold(support, total, delta),
        stage: ContestStage::Decision,
    };
    let winner = if cleared {
        AltId::proposal()
    } else {
        AltId::reality()
    };
    Ok(DecisionOutcome::single(winner, vec![contest]))
}

/// Simple majority; ties keep the status quo.
pub fn majority_base_rule(profile: &BinaryProfile) -> Result<DecisionOutcome, Error> {
    supermajority_rule(profile, Delta::zero())
}

/// Smallest delta that keeps the supermajority rule safe against the given
/// sybil share: half of it.
pub fn min_safe_delta(sigma: SigmaBound) -> Delta {
    Delta::new(sigma.value() * Rational::one_half()).expect("sigma/2 lies in [0, 1/2]")
}

/// Price of resisting a sybil share `sigma` with margin `delta`: the
/// supermajority the genuine agents must muster among themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservatismPoint {
    pub sigma: SigmaBound,
    pub delta: Delta,
    /// Margin beyond 1/2 required among genuine agents alone.
    pub rho: Rational,
    /// False when the genuine agents would need more than unanimity,
    /// i.e. `rho >= 1/2`.
    pub achievable: bool,
}

/// How demanding a `(sigma, delta)` configuration is for the genuine
/// agents: `rho = (1/2 + delta) / (1 - sigma) - 1/2`.
pub fn conservatism(sigma: SigmaBound, delta: Delta) -> Result<ConservatismPoint, Error> {
    if sigma.value() == Rational::one() {
        return Err(Error::NoGenuineAgents);
    }
    let rho = (Rational::one_half() + delta.value()) / (Rational::one() - sigma.value())
        - Rational::one_half();
    Ok(ConservatismPoint {
        sigma,
        delta,
        rho,
        achievable: rho < Rational::one_half(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::REALITY_ID;
    use proptest::prelude::*;

    fn d(s: &str) -> Delta {
        s.parse().unwrap()
    }

    fn sig(s: &str) -> SigmaBound {
        s.parse().unwrap()
    }

    fn winner_of(profile: &BinaryProfile, delta: Delta) -> AltId {
        supermajority_rule(profile, delta)
            .unwrap()
            .winner()
            .unwrap()
            .clone()
    }

    #[test]
    fn clear_supermajority_adopts() {
        let p = BinaryProfile::from_counts(7, 3);
        assert_eq!(winner_of(&p, d("3/20")), AltId::proposal());
    }

    #[test]
    fn tie_keeps_status_quo() {
        let p = BinaryProfile::from_counts(5, 5);
        assert_eq!(winner_of(&p, Delta::zero()), AltId::reality());
        let out = supermajority_rule(&p, Delta::zero()).unwrap();
        assert!(out.trace[0].at_threshold);
    }

    #[test]
    fn eleven_of_twelve_clears_a_sixth() {
        let p = BinaryProfile::from_counts(11, 1);
        assert_eq!(winner_of(&p, d("1/6")), AltId::proposal());
    }

    #[test]
    fn empty_profile_is_an_error() {
        let p = BinaryProfile::new(vec![]);
        assert_eq!(supermajority_rule(&p, Delta::zero()), Err(Error::EmptyProfile));
    }

    #[test]
    fn min_safe_delta_is_half_sigma() {
        assert_eq!(min_safe_delta(sig("0")).value(), Rational::zero());
        assert_eq!(
            min_safe_delta(sig("1/3")).value(),
            Rational::new(1, 6).unwrap()
        );
        assert_eq!(
            min_safe_delta(sig("0.1")).value(),
            Rational::new(1, 20).unwrap()
        );
    }

    #[test]
    fn conservatism_reference_points() {
        let c = conservatism(sig("0"), d("0")).unwrap();
        assert_eq!(c.rho, Rational::zero());
        assert!(c.achievable);

        // One third sybils at delta 1/6 demands genuine unanimity.
        let c = conservatism(sig("1/3"), d("1/6")).unwrap();
        assert_eq!(c.rho, Rational::one_half());
        assert!(!c.achievable);

        let c = conservatism(sig("0.1"), d("0.05")).unwrap();
        assert_eq!(c.rho, Rational::new(1, 9).unwrap());
        assert!(c.achievable);
        // Implied genuine supermajority stays below 61.2%.
        let implied = Rational::one_half() + c.rho;
        assert!(implied < "0.612".parse().unwrap());
    }

    #[test]
    fn all_sybils_is_an_error() {
        assert_eq!(conservatism(sig("1"), d("0")), Err(Error::NoGenuineAgents));
    }

    #[test]
    fn reality_is_default_winner_without_votes_for_proposal() {
        let p = BinaryProfile::from_counts(0, 3);
        assert_eq!(winner_of(&p, Delta::zero()).0, REALITY_ID);
    }

    proptest! {
        // At delta sigma/2 the genuine demand collapses to sigma/(1-sigma).
        #[test]
        fn half_sigma_rho_closed_form(num in 0i128..100, den in 100i128..200) {
            let sigma = Rational::new(num, den).unwrap();
            let s = SigmaBound::new(sigma).unwrap();
            let c = conservatism(s, min_safe_delta(s)).unwrap();
            prop_assert_eq!(c.rho, sigma / (Rational::one() - sigma));
        }

        // Raising delta can only flip outcomes from proposal to reality.
        #[test]
        fn higher_delta_is_more_conservative(p_votes in 0u64..40, r_votes in 0u64..40, a in 0i128..50, b in 100i128..200) {
            prop_assume!(p_votes + r_votes > 0);
            let profile = BinaryProfile::from_counts(p_votes, r_votes);
            let low = Delta::new(Rational::new(a, b).unwrap()).unwrap();
            let high = Delta::new(Rational::new(a + 1, b).unwrap()).unwrap();
            let low_w = winner_of(&profile, low);
            let high_w = winner_of(&profile, high);
            if low_w == AltId::reality() {
                prop_assert_eq!(high_w, AltId::reality());
            }
        }
    }
}
