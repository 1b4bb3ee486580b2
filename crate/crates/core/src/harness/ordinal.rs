//! Audits over ranked-ballot universes.
//!
//! Every implemented ordinal rule is anonymous, so profiles are enumerated
//! as multisets of ballot types (one type per ranking of the alternatives),
//! in ascending lexicographic order of the count vector. Pairwise tallies
//! are accumulated incrementally along the enumeration; any instance that
//! survives to a witness is rebuilt as a concrete profile and replayed
//! through the public rule functions.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{all_rankings, compositions, multiset_count};
use super::{budget_gate, AuditVerdict, Property};
use crate::electorate::Electorate;
use crate::error::Error;
use crate::exact::Rational;
use crate::ordinal::{
    agenda_survivor, amendment_agenda, base_condorcet_rule, contested_mask, no_record,
    outright_winner_in, restrict_profile, supermajority_condorcet_rule, viable_set,
    AlternativeSet, OrdinalProfile, TallyView, Thresholds, Variant,
};
use crate::outcome::AltId;
use crate::threshold::{Delta, SigmaBound};

const UNIVERSE_IDS: [&str; 4] = ["r", "a", "b", "c"];

/// Alternative sets used by the generated universes: the status quo plus
/// up to three named proposals, status quo at index 0.
fn universe_alternatives(m: usize) -> AlternativeSet {
    assert!((1..=UNIVERSE_IDS.len()).contains(&m));
    AlternativeSet::new(
        UNIVERSE_IDS[..m].iter().map(|s| AltId::from(*s)).collect(),
        &AltId::reality(),
    )
    .expect("universe ids are distinct and include the status quo")
}

/// 0/1 matrix of which alternative precedes which on one ballot.
fn contribution(ranking: &[usize], m: usize) -> Vec<u64> {
    let mut pos = vec![0usize; m];
    for (rank, &alt) in ranking.iter().enumerate() {
        pos[alt] = rank;
    }
    let mut contrib = vec![0u64; m * m];
    for a in 0..m {
        for b in 0..m {
            if a != b && pos[a] < pos[b] {
                contrib[a * m + b] = 1;
            }
        }
    }
    contrib
}

fn add_scaled(dst: &mut [u64], src: &[u64], k: u64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s * k;
    }
}

fn tally_of(types: &[Vec<u64>], counts: &[u32], m: usize) -> Vec<u64> {
    let mut tally = vec![0u64; m * m];
    for (t, &c) in counts.iter().enumerate() {
        if c > 0 {
            add_scaled(&mut tally, &types[t], u64::from(c));
        }
    }
    tally
}

/// Expands a ballot-type multiset into a concrete profile, ballots grouped
/// by type in type order.
fn profile_of(alts: &AlternativeSet, types: &[Vec<usize>], counts: &[u32]) -> OrdinalProfile {
    let mut rankings = Vec::new();
    for (t, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            rankings.push(types[t].clone());
        }
    }
    OrdinalProfile::from_index_ballots(alts.clone(), rankings)
        .expect("ballot types are permutations")
}

/// Three fixed agenda orders: floor order, reversed, and rotated by one.
/// Distinct from each other once there are at least three alternatives.
fn agenda_orders(m: usize) -> Vec<Vec<usize>> {
    let forward: Vec<usize> = (0..m).collect();
    let reverse: Vec<usize> = (0..m).rev().collect();
    let rotated: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
    let mut orders = vec![forward, reverse, rotated];
    orders.dedup();
    orders
}

/// An instance on which the amendment agenda and the supermajority
/// Condorcet criterion disagree. Both outputs are the conservative ones;
/// replaying the two public rules on the profile reproduces them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceWitness {
    pub profile: OrdinalProfile,
    pub delta: Delta,
    pub order: Vec<AltId>,
    pub condorcet_winners: BTreeSet<AltId>,
    pub agenda_winners: BTreeSet<AltId>,
}

struct ConformanceScan<'a> {
    types: &'a [Vec<u64>],
    m: usize,
    checks: &'a [(Delta, Thresholds)],
    orders: &'a [Vec<usize>],
}

struct ConformanceHit {
    counts: Vec<u32>,
    delta: Delta,
    order: usize,
}

impl ConformanceScan<'_> {
    fn leaf(&self, counts: &[u32], tally: &[u64]) -> Option<ConformanceHit> {
        let view = TallyView {
            m: self.m,
            counts: tally,
        };
        for &(delta, th) in self.checks {
            let contested = contested_mask(view, 0, th, &mut no_record);
            let winner = outright_winner_in(view, contested, th, &mut no_record);
            for (oi, order) in self.orders.iter().enumerate() {
                let survivor = agenda_survivor(view, 0, contested, th, order, &mut no_record);
                if survivor != winner {
                    return Some(ConformanceHit {
                        counts: counts.to_vec(),
                        delta,
                        order: oi,
                    });
                }
            }
        }
        None
    }

    fn recurse(
        &self,
        depth: usize,
        remaining: u32,
        counts: &mut Vec<u32>,
        tally: &mut Vec<u64>,
    ) -> Option<ConformanceHit> {
        if depth + 1 == counts.len() {
            counts[depth] = remaining;
            add_scaled(tally, &self.types[depth], u64::from(remaining));
            let hit = self.leaf(counts, tally);
            for (d, s) in tally.iter_mut().zip(&self.types[depth]) {
                *d -= s * u64::from(remaining);
            }
            counts[depth] = 0;
            return hit;
        }
        for c in 0..=remaining {
            counts[depth] = c;
            add_scaled(tally, &self.types[depth], u64::from(c));
            let hit = self.recurse(depth + 1, remaining - c, counts, tally);
            for (d, s) in tally.iter_mut().zip(&self.types[depth]) {
                *d -= s * u64::from(c);
            }
            counts[depth] = 0;
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

/// Compares the amendment agenda against the supermajority Condorcet
/// criterion on every profile with up to `m_max` alternatives and `n_max`
/// voters, for every given margin and every agenda order from
/// `agenda_orders`. The comparison is on winner existence and identity,
/// which pins the full output of both variants.
pub fn agenda_conformance(
    m_max: usize,
    n_max: u64,
    deltas: &[Delta],
    budget: u64,
) -> Result<AuditVerdict<ConformanceWitness>, Error> {
    assert!((1..=4).contains(&m_max), "ballot types grow factorially");
    assert!(!deltas.is_empty());
    let mut universe: u64 = 0;
    for m in 1..=m_max {
        let t = all_rankings(m).len() as u64;
        let per_profile = (deltas.len() * agenda_orders(m).len()) as u64;
        for n in 1..=n_max {
            universe += multiset_count(n, t) * per_profile;
        }
    }
    budget_gate(universe, budget)?;

    for m in 1..=m_max {
        let rankings = all_rankings(m);
        let types: Vec<Vec<u64>> = rankings.iter().map(|r| contribution(r, m)).collect();
        let orders = agenda_orders(m);
        let t = types.len();
        for n in 1..=n_max {
            let checks: Vec<(Delta, Thresholds)> = deltas
                .iter()
                .map(|&d| (d, Thresholds::new(n, d)))
                .collect();
            let scan = ConformanceScan {
                types: &types,
                m,
                checks: &checks,
                orders: &orders,
            };
            let hit = if t == 1 {
                let mut counts = vec![0u32; 1];
                let mut tally = vec![0u64; m * m];
                scan.recurse(0, n as u32, &mut counts, &mut tally)
            } else {
                (0..=n as u32).into_par_iter().find_map_first(|c0| {
                    let mut counts = vec![0u32; t];
                    counts[0] = c0;
                    let mut tally = vec![0u64; m * m];
                    add_scaled(&mut tally, &types[0], u64::from(c0));
                    scan.recurse(1, n as u32 - c0, &mut counts, &mut tally)
                })
            };
            if let Some(hit) = hit {
                let alts = universe_alternatives(m);
                let profile = profile_of(&alts, &rankings, &hit.counts);
                let order: Vec<AltId> = orders[hit.order]
                    .iter()
                    .map(|&i| alts.id(i).clone())
                    .collect();
                let condorcet =
                    supermajority_condorcet_rule(&profile, hit.delta, Variant::Conservative)?;
                let agenda =
                    amendment_agenda(&profile, hit.delta, Variant::Conservative, &order)?;
                debug_assert_ne!(condorcet.winners, agenda.winners);
                return Ok(AuditVerdict::violated(
                    Property::Safety,
                    universe,
                    ConformanceWitness {
                        profile,
                        delta: hit.delta,
                        order,
                        condorcet_winners: condorcet.winners,
                        agenda_winners: agenda.winners,
                    },
                ));
            }
        }
    }
    Ok(AuditVerdict::passed(Property::Safety, universe))
}

/// A safety violation of the agenda rule: it elected a proposal the
/// genuine-ballot baseline does not endorse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalSafetyWitness {
    pub electorate: Electorate,
    /// Full profile, genuine ballots first.
    pub profile: OrdinalProfile,
    pub delta: Delta,
    /// The contested set of the full election; the baseline ran on the
    /// genuine ballots restricted to it.
    pub contested: Vec<AltId>,
    pub rule_winners: BTreeSet<AltId>,
    pub base_winners: BTreeSet<AltId>,
}

/// Baseline winner computed directly on tallies: the zero-margin
/// conservative Condorcet rule over the genuine ballots restricted to the
/// full election's contested set. Restriction keeps relative order, so the
/// genuine pairwise counts carry over unchanged and only the candidate set
/// shrinks.
fn kernel_base_winner(
    genuine: TallyView,
    contested_full: u32,
    th_base: Thresholds,
) -> Option<usize> {
    let mut contested_base = 1; // status quo at index 0
    for a in 1..genuine.m {
        if contested_full & (1 << a) != 0 && genuine.count(a, 0) >= th_base.weak_min {
            contested_base |= 1 << a;
        }
    }
    outright_winner_in(genuine, contested_base, th_base, &mut no_record)
}

/// Runs the amendment agenda (floor order, conservative) with margin equal
/// to half the true sybil share on every profile and partition with up to
/// `m_max` alternatives and `n_max` voters, and checks each adopted
/// proposal against the zero-margin conservative Condorcet rule on the
/// genuine ballots restricted to the contested set.
pub fn exhaustive_safety_ordinal(
    m_max: usize,
    n_max: u64,
    budget: u64,
) -> Result<AuditVerdict<OrdinalSafetyWitness>, Error> {
    assert!((1..=4).contains(&m_max), "ballot types grow factorially");
    let mut universe: u64 = 0;
    for m in 1..=m_max {
        let t = all_rankings(m).len() as u64;
        for n in 1..=n_max {
            for s in 0..n {
                universe += multiset_count(n - s, t) * multiset_count(s, t);
            }
        }
    }
    budget_gate(universe, budget)?;

    for m in 1..=m_max {
        let rankings = all_rankings(m);
        let types: Vec<Vec<u64>> = rankings.iter().map(|r| contribution(r, m)).collect();
        let t = types.len();
        let forward: Vec<usize> = (0..m).collect();
        for n in 1..=n_max {
            for s in 0..n {
                let h = n - s;
                let delta = Delta::new(
                    Rational::new(s as i128, 2 * n as i128).expect("positive electorate"),
                )
                .expect("half a sybil share below one is a valid margin");
                let th_rule = Thresholds::new(n, delta);
                let th_base = Thresholds::new(h, Delta::zero());
                let sybil_side: Vec<(Vec<u32>, Vec<u64>)> = compositions(s as u32, t)
                    .into_iter()
                    .map(|c| {
                        let tally = tally_of(&types, &c, m);
                        (c, tally)
                    })
                    .collect();
                for g_counts in compositions(h as u32, t) {
                    let tally_g = tally_of(&types, &g_counts, m);
                    let genuine_view = TallyView {
                        m,
                        counts: &tally_g,
                    };
                    for (s_counts, tally_s) in &sybil_side {
                        let mut tally_full = tally_g.clone();
                        for (d, x) in tally_full.iter_mut().zip(tally_s) {
                            *d += x;
                        }
                        let view = TallyView {
                            m,
                            counts: &tally_full,
                        };
                        let contested = contested_mask(view, 0, th_rule, &mut no_record);
                        let survivor =
                            agenda_survivor(view, 0, contested, th_rule, &forward, &mut no_record);
                        debug_assert_eq!(
                            survivor,
                            outright_winner_in(view, contested, th_rule, &mut no_record)
                        );
                        let adopted = match survivor {
                            None | Some(0) => None,
                            Some(c) => Some(c),
                        };
                        let Some(c) = adopted else { continue };
                        if kernel_base_winner(genuine_view, contested, th_base) == Some(c) {
                            continue;
                        }
                        let witness = build_ordinal_safety_witness(
                            m, h, s, delta, &rankings, &g_counts, s_counts,
                        )?;
                        return Ok(AuditVerdict::violated(Property::Safety, universe, witness));
                    }
                }
            }
        }
    }
    Ok(AuditVerdict::passed(Property::Safety, universe))
}

fn build_ordinal_safety_witness(
    m: usize,
    genuine: u64,
    sybils: u64,
    delta: Delta,
    rankings: &[Vec<usize>],
    g_counts: &[u32],
    s_counts: &[u32],
) -> Result<OrdinalSafetyWitness, Error> {
    let alts = universe_alternatives(m);
    let genuine_profile = profile_of(&alts, rankings, g_counts);
    let mut ballots: Vec<Vec<AltId>> = Vec::new();
    for counts in [g_counts, s_counts] {
        for (t, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                ballots.push(rankings[t].iter().map(|&i| alts.id(i).clone()).collect());
            }
        }
    }
    let profile = OrdinalProfile::new(alts.clone(), ballots)?;
    let electorate = Electorate::with_counts(genuine, sybils)?;
    let order: Vec<AltId> = alts.ids().to_vec();
    let rule_out = amendment_agenda(&profile, delta, Variant::Conservative, &order)?;
    let contested = viable_set(&profile, delta)?.members;
    let restricted = restrict_profile(&genuine_profile, &contested)?;
    let base_out = base_condorcet_rule(&restricted, Variant::Conservative)?;
    Ok(OrdinalSafetyWitness {
        electorate,
        profile,
        delta,
        contested,
        rule_winners: rule_out.winners,
        base_winners: base_out.winners,
    })
}

/// A sybil ballot assignment the genuine agents cannot answer: no genuine
/// assignment (unanimity at the target tried first, then every multiset)
/// makes the agenda elect the target. The attempted profile shows the
/// unanimous try.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalLivenessWitness {
    pub electorate: Electorate,
    pub target: AltId,
    pub sybil_ballots: Vec<Vec<AltId>>,
    /// Full profile: every genuine agent ranks the target first and the
    /// status quo last, sybils vote as recorded.
    pub attempted: OrdinalProfile,
    pub rule_winners: BTreeSet<AltId>,
}

/// Checks that on every electorate realizing the sybil share exactly
/// (sizes up to `n_max`, `m` alternatives), for every sybil ballot
/// assignment and every proposal, some genuine assignment makes the
/// amendment agenda (margin = half the share, floor order, conservative)
/// elect that proposal.
pub fn check_liveness_ordinal(
    m: usize,
    sigma: SigmaBound,
    n_max: u64,
    budget: u64,
) -> Result<AuditVerdict<OrdinalLivenessWitness>, Error> {
    assert!((2..=4).contains(&m), "need a proposal besides the status quo");
    let denom = sigma.value().denom() as u64;
    let numer = sigma.value().numer() as u64;
    if denom > n_max {
        return Err(Error::UnrealizableSigma { denom, n_max });
    }
    let realizations: Vec<(u64, u64)> = (1..=n_max / denom)
        .map(|k| (k * denom, k * numer))
        .collect();
    let rankings = all_rankings(m);
    let types: Vec<Vec<u64>> = rankings.iter().map(|r| contribution(r, m)).collect();
    let t = types.len() as u64;
    let mut universe: u64 = 0;
    for &(n, s) in &realizations {
        universe += (m as u64 - 1) * multiset_count(s, t) * (1 + multiset_count(n - s, t));
    }
    budget_gate(universe, budget)?;

    let delta = crate::proposal::min_safe_delta(sigma);
    let forward: Vec<usize> = (0..m).collect();
    for &(n, s) in &realizations {
        let h = n - s;
        let th = Thresholds::new(n, delta);
        let sybil_side: Vec<(Vec<u32>, Vec<u64>)> = compositions(s as u32, t as usize)
            .into_iter()
            .map(|c| {
                let tally = tally_of(&types, &c, m);
                (c, tally)
            })
            .collect();
        let genuine_side = compositions(h as u32, t as usize);
        for target in 1..m {
            // Target first, status quo last, the rest in index order.
            let mut unanimous: Vec<usize> = vec![target];
            unanimous.extend((1..m).filter(|&a| a != target));
            unanimous.push(0);
            let unanimous_contrib = contribution(&unanimous, m);
            for (s_counts, tally_s) in &sybil_side {
                let elects_target = |tally_full: &[u64]| {
                    let view = TallyView {
                        m,
                        counts: tally_full,
                    };
                    let contested = contested_mask(view, 0, th, &mut no_record);
                    agenda_survivor(view, 0, contested, th, &forward, &mut no_record)
                        == Some(target)
                };
                let mut tally_full = tally_s.clone();
                add_scaled(&mut tally_full, &unanimous_contrib, h);
                let mut live = elects_target(&tally_full);
                if !live {
                    live = genuine_side.iter().any(|g_counts| {
                        let mut tally = tally_s.clone();
                        for (tt, &c) in g_counts.iter().enumerate() {
                            if c > 0 {
                                add_scaled(&mut tally, &types[tt], u64::from(c));
                            }
                        }
                        elects_target(&tally)
                    });
                }
                if live {
                    continue;
                }
                let alts = universe_alternatives(m);
                let sybil_ballots: Vec<Vec<AltId>> = {
                    let mut out = Vec::new();
                    for (tt, &c) in s_counts.iter().enumerate() {
                        for _ in 0..c {
                            out.push(rankings[tt].iter().map(|&i| alts.id(i).clone()).collect());
                        }
                    }
                    out
                };
                let mut ballots: Vec<Vec<AltId>> = Vec::new();
                let unanimous_ids: Vec<AltId> =
                    unanimous.iter().map(|&i| alts.id(i).clone()).collect();
                for _ in 0..h {
                    ballots.push(unanimous_ids.clone());
                }
                ballots.extend(sybil_ballots.iter().cloned());
                let attempted = OrdinalProfile::new(alts.clone(), ballots)?;
                let order: Vec<AltId> = alts.ids().to_vec();
                let rule_out =
                    amendment_agenda(&attempted, delta, Variant::Conservative, &order)?;
                debug_assert_ne!(rule_out.winner(), Some(&alts.id(target).clone()));
                return Ok(AuditVerdict::violated(
                    Property::Liveness,
                    universe,
                    OrdinalLivenessWitness {
                        electorate: Electorate::with_counts(h, s)?,
                        target: alts.id(target).clone(),
                        sybil_ballots,
                        attempted,
                        rule_winners: rule_out.winners,
                    },
                ));
            }
        }
    }
    Ok(AuditVerdict::passed(Property::Liveness, universe))
}
