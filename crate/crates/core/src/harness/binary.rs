//! Safety and liveness audits over the binary (proposal vs status quo)
//! universe.
//!
//! The safety search is literal: every electorate size up to the bound,
//! every sybil subset as a bitmask, every vote assignment as a bitmask.
//! Instances are checked through precomputed count thresholds, so the
//! whole n <= 12 universe (about 22 million instances) stays well under a
//! second; each witness is rebuilt through the public rule functions
//! before it is returned.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::binomial;
use super::{budget_gate, AuditVerdict, Property};
use crate::electorate::{AgentId, Electorate};
use crate::error::Error;
use crate::exact::Rational;
use crate::outcome::AltId;
use crate::proposal::{majority_base_rule, supermajority_rule, BinaryProfile, BinaryVote};
use crate::threshold::{strict_min_count, Delta, SigmaBound};

/// A binary decision rule the harness can audit or use as a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryRule {
    /// Adopt the proposal on a strict `(1/2 + delta)` share of all votes.
    Supermajority { delta: Delta },
    /// Adopt the proposal on a strict majority of all votes.
    Majority,
    /// Keep the status quo no matter what. Degenerate, used to exercise
    /// the liveness audit.
    AlwaysReality,
}

impl BinaryRule {
    pub fn apply(&self, profile: &BinaryProfile) -> Result<crate::outcome::DecisionOutcome, Error> {
        match self {
            BinaryRule::Supermajority { delta } => supermajority_rule(profile, *delta),
            BinaryRule::Majority => majority_base_rule(profile),
            BinaryRule::AlwaysReality => {
                if profile.is_empty() {
                    return Err(Error::EmptyProfile);
                }
                Ok(crate::outcome::DecisionOutcome::single(
                    AltId::reality(),
                    Vec::new(),
                ))
            }
        }
    }

    /// Smallest proposal count that makes the rule adopt, or `None` if no
    /// count does. Mirrors `apply` exactly; the audits loop over this.
    fn min_proposal_count(&self, total: u64) -> Option<u64> {
        match self {
            BinaryRule::Supermajority { delta } => Some(strict_min_count(total, *delta)),
            BinaryRule::Majority => Some(strict_min_count(total, Delta::zero())),
            BinaryRule::AlwaysReality => None,
        }
    }
}

/// How the audited supermajority rule picks its margin for an electorate
/// with `s` sybils out of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// Margin = half the true sybil share, the minimal safe choice.
    HalfSigma,
    /// One margin for every partition, regardless of the true share.
    Fixed(Delta),
}

impl DeltaPolicy {
    pub fn delta_for(&self, sybils: u64, total: u64) -> Delta {
        match self {
            DeltaPolicy::HalfSigma => {
                let sigma_half = Rational::new(sybils as i128, 2 * total as i128)
                    .expect("electorate size is positive");
                Delta::new(sigma_half).expect("half a sybil share below one is a valid margin")
            }
            DeltaPolicy::Fixed(delta) => *delta,
        }
    }
}

/// A complete safety violation: the partition, every vote, and both rule
/// outputs. Replaying `rule` on the full profile and `base` on the genuine
/// restriction reproduces the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarySafetyWitness {
    pub rule: BinaryRule,
    pub base: BinaryRule,
    pub electorate: Electorate,
    /// Full profile, one vote per agent in ascending id order.
    pub votes: BinaryProfile,
    pub rule_winners: BTreeSet<AltId>,
    pub base_winners: BTreeSet<AltId>,
}

fn honest_restriction(electorate: &Electorate, full: &BinaryProfile) -> BinaryProfile {
    let votes = full.votes();
    BinaryProfile::new(
        electorate
            .genuine_positions()
            .into_iter()
            .map(|i| votes[i])
            .collect(),
    )
}

fn build_safety_witness(
    rule: BinaryRule,
    base: BinaryRule,
    electorate: Electorate,
    votes: BinaryProfile,
) -> Result<BinarySafetyWitness, Error> {
    let honest = honest_restriction(&electorate, &votes);
    let rule_winners = rule.apply(&votes)?.winners;
    let base_winners = base.apply(&honest)?.winners;
    Ok(BinarySafetyWitness {
        rule,
        base,
        electorate,
        votes,
        rule_winners,
        base_winners,
    })
}

/// Checks one instance: if the rule adopts the proposal, the base rule on
/// the genuine votes alone must adopt it too.
///
/// `honest` must be exactly the genuine agents' votes from `full`, in the
/// same relative order.
pub fn check_safety_instance(
    rule: BinaryRule,
    base: BinaryRule,
    electorate: &Electorate,
    full: &BinaryProfile,
    honest: &BinaryProfile,
) -> Result<AuditVerdict<BinarySafetyWitness>, Error> {
    if full.len() != electorate.len() {
        return Err(Error::ProfileSizeMismatch {
            expected: electorate.len() as usize,
            actual: full.len() as usize,
        });
    }
    if honest.len() != electorate.genuine_count() {
        return Err(Error::ProfileSizeMismatch {
            expected: electorate.genuine_count() as usize,
            actual: honest.len() as usize,
        });
    }
    if *honest != honest_restriction(electorate, full) {
        return Err(Error::RestrictionMismatch);
    }
    let rule_out = rule.apply(full)?;
    if rule_out.keeps(&AltId::reality()) {
        return Ok(AuditVerdict::passed(Property::Safety, 1));
    }
    let base_out = base.apply(honest)?;
    if rule_out.winners.is_subset(&base_out.winners) {
        return Ok(AuditVerdict::passed(Property::Safety, 1));
    }
    Ok(AuditVerdict::violated(
        Property::Safety,
        1,
        BinarySafetyWitness {
            rule,
            base,
            electorate: electorate.clone(),
            votes: full.clone(),
            rule_winners: rule_out.winners,
            base_winners: base_out.winners,
        },
    ))
}

fn electorate_from_mask(n: u64, sybil_mask: u32) -> Electorate {
    let mut genuine = BTreeSet::new();
    let mut sybils = BTreeSet::new();
    for i in 0..n as u32 {
        if sybil_mask & (1 << i) != 0 {
            sybils.insert(AgentId(i));
        } else {
            genuine.insert(AgentId(i));
        }
    }
    Electorate::new(genuine, sybils).expect("mask partition is disjoint and nonempty")
}

fn profile_from_mask(n: u64, votes_mask: u32) -> BinaryProfile {
    BinaryProfile::new(
        (0..n as u32)
            .map(|i| {
                if votes_mask & (1 << i) != 0 {
                    BinaryVote::Proposal
                } else {
                    BinaryVote::Reality
                }
            })
            .collect(),
    )
}

/// Checks every instance with up to `n_max` agents: every sybil subset
/// (as long as at least one agent is genuine, and with the sybil share
/// strictly below `penetration` when one is given) and every vote
/// assignment. The audited rule is the supermajority rule with the margin
/// the policy assigns to each partition.
///
/// Instances are visited in ascending (n, sybil bitmask, vote bitmask)
/// order and the first violation in that order is returned, regardless of
/// how the work is scheduled across threads.
pub fn exhaustive_safety_binary(
    policy: DeltaPolicy,
    base: BinaryRule,
    n_max: u64,
    penetration: Option<SigmaBound>,
    budget: u64,
) -> Result<AuditVerdict<BinarySafetyWitness>, Error> {
    assert!(n_max >= 1 && n_max <= 24, "bitmask enumeration bound");
    let allows = |s: u64, n: u64| match penetration {
        None => true,
        Some(p) => {
            Rational::new(s as i128, n as i128).expect("positive electorate") < p.value()
        }
    };
    let mut universe: u64 = 0;
    for n in 1..=n_max {
        let masks: u64 = (0..n).filter(|&s| allows(s, n)).map(|s| binomial(n, s)).sum();
        universe += masks << n;
    }
    budget_gate(universe, budget)?;

    for n in 1..=n_max {
        let full_mask: u32 = (1u32 << n) - 1;
        let allowed_by_s: Vec<bool> = (0..n).map(|s| allows(s, n)).collect();
        let rule_min_by_s: Vec<u64> = (0..n)
            .map(|s| strict_min_count(n, policy.delta_for(s, n)))
            .collect();
        let base_min_by_h: Vec<Option<u64>> =
            (0..=n).map(|h| base.min_proposal_count(h)).collect();

        let hit = (0..full_mask).into_par_iter().find_map_first(|sybil_mask| {
            let s = sybil_mask.count_ones() as u64;
            if !allowed_by_s[s as usize] {
                return None;
            }
            let rule_min = rule_min_by_s[s as usize];
            let base_min = base_min_by_h[(n - s) as usize];
            let genuine_mask = !sybil_mask & full_mask;
            for votes in 0..=full_mask {
                let support = u64::from(votes.count_ones());
                if support < rule_min {
                    continue;
                }
                let honest_support = u64::from((votes & genuine_mask).count_ones());
                let base_adopts = match base_min {
                    Some(k) => honest_support >= k,
                    None => false,
                };
                if !base_adopts {
                    return Some((sybil_mask, votes, s));
                }
            }
            None
        });

        if let Some((sybil_mask, votes, s)) = hit {
            let rule = BinaryRule::Supermajority {
                delta: policy.delta_for(s, n),
            };
            let witness = build_safety_witness(
                rule,
                base,
                electorate_from_mask(n, sybil_mask),
                profile_from_mask(n, votes),
            )?;
            debug_assert!(!witness.rule_winners.is_subset(&witness.base_winners));
            return Ok(AuditVerdict::violated(Property::Safety, universe, witness));
        }
    }
    Ok(AuditVerdict::passed(Property::Safety, universe))
}

/// Largest margin below which the supermajority rule is unsafe against the
/// genuine-majority baseline on some instance with exactly `sybils` sybils
/// out of `n` agents: every `delta` strictly below the boundary admits a
/// counterexample, and none at or above it does.
///
/// With an even number of genuine agents the boundary is half the sybil
/// share, `s/(2n)`. With an odd number the genuine majority threshold has
/// slack and the boundary drops to `(s-1)/(2n)`; in particular the margins
/// `(s-1)/(2n)` and `s/(2n)` then define extensionally identical rules. A
/// non-positive boundary means every margin is safe.
pub fn tightness_boundary(n: u64, sybils: u64) -> Rational {
    assert!(n >= 1 && sybils < n);
    let h = n - sybils;
    let numer = if h % 2 == 0 {
        sybils as i128
    } else {
        sybils as i128 - 1
    };
    Rational::new(numer, 2 * n as i128).expect("electorate size is positive")
}

/// Searches every electorate of `n` agents with exactly `sybils` sybils for
/// a safety violation of the `delta`-supermajority rule against the
/// genuine-majority baseline. Vote assignments are enumerated up to
/// anonymity (by proposal counts); the returned witness is a concrete
/// instance in canonical layout, genuine agents first.
pub fn find_tightness_witness(
    n: u64,
    sybils: u64,
    delta: Delta,
) -> Result<Option<BinarySafetyWitness>, Error> {
    if n == 0 || sybils >= n {
        return Err(Error::EmptyElectorate);
    }
    let h = n - sybils;
    let rule_min = strict_min_count(n, delta);
    let base_min = strict_min_count(h, Delta::zero());
    for genuine_for in 0..=h {
        if genuine_for >= base_min {
            break;
        }
        for sybils_for in 0..=sybils {
            if genuine_for + sybils_for < rule_min {
                continue;
            }
            let electorate = Electorate::with_counts(h, sybils)?;
            let mut votes = Vec::with_capacity(n as usize);
            votes.extend(std::iter::repeat(BinaryVote::Proposal).take(genuine_for as usize));
            votes.extend(std::iter::repeat(BinaryVote::Reality).take((h - genuine_for) as usize));
            votes.extend(std::iter::repeat(BinaryVote::Proposal).take(sybils_for as usize));
            votes.extend(
                std::iter::repeat(BinaryVote::Reality).take((sybils - sybils_for) as usize),
            );
            let witness = build_safety_witness(
                BinaryRule::Supermajority { delta },
                BinaryRule::Majority,
                electorate,
                BinaryProfile::new(votes),
            )?;
            debug_assert!(!witness.rule_winners.is_subset(&witness.base_winners));
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// A liveness failure: a sybil vote assignment the genuine agents cannot
/// overcome. The attempted profile shows the strongest try, unanimous
/// genuine support for the proposal, and the rule still keeping the status
/// quo; the audit also confirmed every weaker genuine assignment fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryLivenessWitness {
    pub rule: BinaryRule,
    pub electorate: Electorate,
    /// Votes of the sybils only, in ascending id order.
    pub sybil_votes: Vec<BinaryVote>,
    /// Full profile with every genuine agent voting for the proposal.
    pub attempted: BinaryProfile,
    pub rule_winners: BTreeSet<AltId>,
}

/// Checks that for every electorate realizing the sybil share exactly
/// (sizes up to `n_max`) and every sybil vote assignment, some genuine
/// vote assignment makes the rule adopt the proposal. Unanimous genuine
/// support is tried first; if it fails, every smaller genuine proposal
/// count is tried before the instance is declared blocked.
pub fn check_liveness_binary(
    rule: BinaryRule,
    sigma: crate::threshold::SigmaBound,
    n_max: u64,
    budget: u64,
) -> Result<AuditVerdict<BinaryLivenessWitness>, Error> {
    let denom = sigma.value().denom() as u64;
    let numer = sigma.value().numer() as u64;
    if denom > n_max {
        return Err(Error::UnrealizableSigma { denom, n_max });
    }
    let realizations: Vec<(u64, u64)> = (1..=n_max / denom)
        .map(|k| (k * denom, k * numer))
        .collect();
    let mut universe: u64 = 0;
    for &(n, s) in &realizations {
        universe += (s + 1) * (n - s + 1);
    }
    budget_gate(universe, budget)?;

    for &(n, s) in &realizations {
        let h = n - s;
        let min = rule.min_proposal_count(n);
        for sybils_for in 0..=s {
            let live = (0..=h)
                .rev()
                .any(|genuine_for| matches!(min, Some(k) if genuine_for + sybils_for >= k));
            if live {
                continue;
            }
            let electorate = Electorate::with_counts(h, s)?;
            let sybil_votes: Vec<BinaryVote> = (0..s)
                .map(|i| {
                    if i < sybils_for {
                        BinaryVote::Proposal
                    } else {
                        BinaryVote::Reality
                    }
                })
                .collect();
            let mut votes = vec![BinaryVote::Proposal; h as usize];
            votes.extend(sybil_votes.iter().copied());
            let attempted = BinaryProfile::new(votes);
            let rule_winners = rule.apply(&attempted)?.winners;
            debug_assert!(rule_winners.contains(&AltId::reality()));
            return Ok(AuditVerdict::violated(
                Property::Liveness,
                universe,
                BinaryLivenessWitness {
                    rule,
                    electorate,
                    sybil_votes,
                    attempted,
                    rule_winners,
                },
            ));
        }
    }
    Ok(AuditVerdict::passed(Property::Liveness, universe))
}
