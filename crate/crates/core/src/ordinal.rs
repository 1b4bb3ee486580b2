//! Ranked elections over several alternatives with the status quo always on
//! the ballot.
//!
//! The contested set holds every alternative that at least a `(1/2 + d)`
//! fraction of voters weakly prefers to the status quo (the status quo is
//! always a member). A delta-`d` outright winner is a member that beats
//! every other member by a strict `(1/2 + d)` supermajority. Two rules elect
//! it: a direct pairwise scan, and a sequential amendment vote starting from
//! the status quo. When no outright winner exists, the conservative variant
//! keeps the status quo and the permissive variant reports the whole
//! contested set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::outcome::{AltId, Contest, ContestStage, DecisionOutcome};
use crate::threshold::{strict_min_count, weak_min_count, Delta};

/// Most alternatives a single election may carry. Membership sets are kept
/// as `u32` bitmasks.
pub const MAX_ALTERNATIVES: usize = 32;

/// The named alternatives of an election, one of which is the status quo.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternativeSet {
    ids: Vec<AltId>,
    reality: usize,
}

impl AlternativeSet {
    pub fn new(ids: Vec<AltId>, reality: &AltId) -> Result<Self, Error> {
        if ids.is_empty() {
            return Err(Error::InvalidAlternatives("no alternatives".into()));
        }
        if ids.len() > MAX_ALTERNATIVES {
            return Err(Error::InvalidAlternatives(format!(
                "more than {MAX_ALTERNATIVES} alternatives"
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id) {
                return Err(Error::InvalidAlternatives(format!("duplicate id {id}")));
            }
        }
        let reality = ids
            .iter()
            .position(|id| id == reality)
            .ok_or_else(|| Error::InvalidAlternatives(format!("status quo {reality} not listed")))?;
        Ok(Self { ids, reality })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false // ruled out at construction
    }

    pub fn ids(&self) -> &[AltId] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &AltId {
        &self.ids[index]
    }

    pub fn reality_index(&self) -> usize {
        self.reality
    }

    pub fn reality_id(&self) -> &AltId {
        &self.ids[self.reality]
    }

    pub fn index_of(&self, id: &AltId) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

/// Ranked ballots, each a strict total order over all alternatives,
/// best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalProfile {
    alts: AlternativeSet,
    rankings: Vec<Vec<usize>>,
}

impl OrdinalProfile {
    /// Builds a profile from ballots of alternative ids.
    pub fn new(alts: AlternativeSet, ballots: Vec<Vec<AltId>>) -> Result<Self, Error> {
        let mut rankings = Vec::with_capacity(ballots.len());
        for ballot in &ballots {
            let mut ranking = Vec::with_capacity(ballot.len());
            for id in ballot {
                let idx = alts
                    .index_of(id)
                    .ok_or_else(|| Error::InvalidBallot(format!("unknown alternative {id}")))?;
                ranking.push(idx);
            }
            check_permutation(&ranking, alts.len())?;
            rankings.push(ranking);
        }
        Ok(Self { alts, rankings })
    }

    /// Builds a profile from ballots of alternative indices.
    pub fn from_index_ballots(
        alts: AlternativeSet,
        rankings: Vec<Vec<usize>>,
    ) -> Result<Self, Error> {
        for ranking in &rankings {
            check_permutation(ranking, alts.len())?;
        }
        Ok(Self { alts, rankings })
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alts
    }

    pub fn len(&self) -> u64 {
        self.rankings.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }

    pub fn rankings(&self) -> &[Vec<usize>] {
        &self.rankings
    }
}

fn check_permutation(ranking: &[usize], m: usize) -> Result<(), Error> {
    if ranking.len() != m {
        return Err(Error::InvalidBallot(format!(
            "ranking lists {} of {m} alternatives",
            ranking.len()
        )));
    }
    let mut seen = vec![false; m];
    for &idx in ranking {
        if idx >= m || seen[idx] {
            return Err(Error::InvalidBallot("ranking is not a permutation".into()));
        }
        seen[idx] = true;
    }
    Ok(())
}

/// Pairwise preference counts: `count(a, b)` voters rank `a` above `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseTally {
    alts: AlternativeSet,
    n: u64,
    counts: Vec<u64>,
}

impl PairwiseTally {
    pub fn from_counts(alts: AlternativeSet, n: u64, counts: Vec<u64>) -> Result<Self, Error> {
        let m = alts.len();
        if counts.len() != m * m {
            return Err(Error::InvalidAlternatives(format!(
                "tally has {} cells, expected {}",
                counts.len(),
                m * m
            )));
        }
        for a in 0..m {
            for b in 0..m {
                let sum = counts[a * m + b] + counts[b * m + a];
                let expected = if a == b { 0 } else { n };
                if sum != expected {
                    return Err(Error::InvalidBallot(format!(
                        "tally cells for ({a},{b}) sum to {sum}, expected {expected}"
                    )));
                }
            }
        }
        Ok(Self { alts, n, counts })
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alts
    }

    pub fn voters(&self) -> u64 {
        self.n
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.alts.len() + b]
    }

    pub(crate) fn view(&self) -> TallyView<'_> {
        TallyView {
            m: self.alts.len(),
            counts: &self.counts,
        }
    }
}

/// Borrowed, id-free tally used by the rules and the audit harness.
/// Voter count travels separately, inside the precomputed thresholds.
#[derive(Clone, Copy)]
pub(crate) struct TallyView<'a> {
    pub m: usize,
    pub counts: &'a [u64],
}

impl TallyView<'_> {
    #[inline]
    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.m + b]
    }
}

/// Counts every ordered pair across all ballots.
pub fn pairwise_tally(profile: &OrdinalProfile) -> PairwiseTally {
    let m = profile.alts.len();
    let mut counts = vec![0u64; m * m];
    let mut pos = vec![0usize; m];
    for ranking in &profile.rankings {
        for (rank, &alt) in ranking.iter().enumerate() {
            pos[alt] = rank;
        }
        for a in 0..m {
            for b in 0..m {
                if a != b && pos[a] < pos[b] {
                    counts[a * m + b] += 1;
                }
            }
        }
    }
    PairwiseTally {
        alts: profile.alts.clone(),
        n: profile.len(),
        counts,
    }
}

/// Precomputed count thresholds for one electorate size and delta.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Thresholds {
    pub n: u64,
    pub strict_min: u64,
    pub weak_min: u64,
}

impl Thresholds {
    pub fn new(n: u64, delta: Delta) -> Self {
        Self {
            n,
            strict_min: strict_min_count(n, delta),
            weak_min: weak_min_count(n, delta),
        }
    }
}

#[inline]
fn bit(i: usize) -> u32 {
    1 << i
}

pub(crate) fn mask_members(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Callback receiving every contest a rule evaluates, in order.
/// `(stage, challenger, defender, support, weak, cleared)`
pub(crate) type ContestRecorder<'r> = &'r mut dyn FnMut(ContestStage, usize, usize, u64, bool, bool);

pub(crate) fn no_record(_: ContestStage, _: usize, _: usize, _: u64, _: bool, _: bool) {}

/// Members weakly preferred to the status quo by a `(1/2 + delta)` share,
/// as a bitmask. The status quo is always included.
pub(crate) fn contested_mask(t: TallyView, reality: usize, th: Thresholds, rec: ContestRecorder) -> u32 {
    let mut mask = bit(reality);
    for a in 0..t.m {
        if a == reality {
            continue;
        }
        let support = t.count(a, reality);
        let cleared = support >= th.weak_min;
        rec(ContestStage::Viability, a, reality, support, true, cleared);
        if cleared {
            mask |= bit(a);
        }
    }
    mask
}

/// The member of `mask` that beats every other member by a strict
/// supermajority, if one exists. At most one member can.
pub(crate) fn outright_winner_in(
    t: TallyView,
    mask: u32,
    th: Thresholds,
    rec: ContestRecorder,
) -> Option<usize> {
    for a in mask_members(mask) {
        let mut wins_all = true;
        for b in mask_members(mask) {
            if a == b {
                continue;
            }
            let support = t.count(a, b);
            let cleared = support >= th.strict_min;
            rec(ContestStage::CondorcetScan, a, b, support, false, cleared);
            if !cleared {
                wins_all = false;
                break;
            }
        }
        if wins_all {
            return Some(a);
        }
    }
    None
}

/// Sequential amendment vote over the contested set, starting from the
/// status quo. Challengers take the floor in `order`; a challenger replaces
/// the incumbent only by strict supermajority. The survivor is then
/// re-voted against every contested member it has not already beaten
/// outright; it is elected only if it clears them all.
pub(crate) fn agenda_survivor(
    t: TallyView,
    reality: usize,
    contested: u32,
    th: Thresholds,
    order: &[usize],
    rec: ContestRecorder,
) -> Option<usize> {
    let mut incumbent = reality;
    // Members the incumbent has beaten by strict supermajority in a contest
    // already held. A failed challenge does not count as a win for the
    // incumbent unless the reverse count clears the bar on its own.
    let mut beaten: u32 = 0;
    for &c in order {
        if c == reality || contested & bit(c) == 0 {
            continue;
        }
        let support = t.count(c, incumbent);
        let cleared = support >= th.strict_min;
        rec(ContestStage::Sequence, c, incumbent, support, false, cleared);
        if cleared {
            beaten = bit(incumbent);
            incumbent = c;
        } else if t.count(incumbent, c) >= th.strict_min {
            beaten |= bit(c);
        }
    }
    let remaining = contested & !beaten & !bit(incumbent);
    for a in mask_members(remaining) {
        let support = t.count(incumbent, a);
        let cleared = support >= th.strict_min;
        rec(ContestStage::FinalCheck, incumbent, a, support, false, cleared);
        if !cleared {
            return None;
        }
    }
    Some(incumbent)
}

/// What to elect when no outright winner exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Keep the status quo.
    Conservative,
    /// Elect the whole contested set as co-winners.
    Permissive,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Conservative => f.write_str("conservative"),
            Variant::Permissive => f.write_str("permissive"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "conservative" => Ok(Variant::Conservative),
            "permissive" => Ok(Variant::Permissive),
            other => Err(Error::InvalidVariant(other.to_string())),
        }
    }
}

/// The election narrowed to a subset of alternatives: ballots keep their
/// relative order over the kept ids. The status quo must be kept.
pub fn restrict_profile(profile: &OrdinalProfile, keep: &[AltId]) -> Result<OrdinalProfile, Error> {
    let alts = AlternativeSet::new(keep.to_vec(), profile.alts.reality_id())?;
    let mut kept_old = vec![false; profile.alts.len()];
    let mut new_index = vec![usize::MAX; profile.alts.len()];
    for id in keep {
        let old = profile
            .alts
            .index_of(id)
            .ok_or_else(|| Error::InvalidAlternatives(format!("unknown alternative {id}")))?;
        kept_old[old] = true;
        new_index[old] = alts.index_of(id).expect("id was just inserted");
    }
    let rankings = profile
        .rankings
        .iter()
        .map(|ranking| {
            ranking
                .iter()
                .filter(|&&a| kept_old[a])
                .map(|&a| new_index[a])
                .collect()
        })
        .collect();
    OrdinalProfile::from_index_ballots(alts, rankings)
}

/// The contested set of an election, status quo included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViableSet {
    pub members: Vec<AltId>,
    pub delta: Delta,
}

pub fn viable_set(profile: &OrdinalProfile, delta: Delta) -> Result<ViableSet, Error> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let tally = pairwise_tally(profile);
    let th = Thresholds::new(tally.n, delta);
    let mask = contested_mask(tally.view(), profile.alts.reality_index(), th, &mut no_record);
    Ok(ViableSet {
        members: mask_members(mask).map(|i| profile.alts.id(i).clone()).collect(),
        delta,
    })
}

/// The unique member of `subset` that beats every other member of `subset`
/// by a strict `(1/2 + delta)` supermajority, if any.
pub fn delta_condorcet_winner(
    tally: &PairwiseTally,
    subset: &[AltId],
    delta: Delta,
) -> Result<Option<AltId>, Error> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if tally.n == 0 {
        return Err(Error::EmptyProfile);
    }
    let mut mask = 0u32;
    for id in subset {
        let idx = tally
            .alts
            .index_of(id)
            .ok_or_else(|| Error::InvalidAlternatives(format!("unknown alternative {id}")))?;
        mask |= bit(idx);
    }
    let th = Thresholds::new(tally.n, delta);
    Ok(outright_winner_in(tally.view(), mask, th, &mut no_record)
        .map(|i| tally.alts.id(i).clone()))
}

struct TraceBuilder<'a> {
    alts: &'a AlternativeSet,
    delta: Delta,
    th: Thresholds,
    contests: Vec<Contest>,
}

impl<'a> TraceBuilder<'a> {
    fn new(alts: &'a AlternativeSet, delta: Delta, th: Thresholds) -> Self {
        Self {
            alts,
            delta,
            th,
            contests: Vec::new(),
        }
    }

    fn record(
        &mut self,
        stage: ContestStage,
        challenger: usize,
        defender: usize,
        support: u64,
        weak: bool,
        cleared: bool,
    ) {
        self.contests.push(Contest {
            challenger: self.alts.id(challenger).clone(),
            defender: self.alts.id(defender).clone(),
            support,
            total: self.th.n,
            delta: self.delta.value(),
            weak,
            cleared,
            at_threshold: support == self.th.weak_min && self.th.weak_min != self.th.strict_min,
            stage,
        });
    }
}

fn elect(
    alts: &AlternativeSet,
    contested: u32,
    winner: Option<usize>,
    variant: Variant,
    trace: Vec<Contest>,
) -> DecisionOutcome {
    match winner {
        Some(w) => DecisionOutcome::single(alts.id(w).clone(), trace),
        None => match variant {
            Variant::Conservative => DecisionOutcome::single(alts.reality_id().clone(), trace),
            Variant::Permissive => DecisionOutcome::new(
                mask_members(contested).map(|i| alts.id(i).clone()).collect(),
                trace,
            ),
        },
    }
}

/// Elects the outright winner of the contested set at delta zero, or falls
/// back per `variant`.
pub fn base_condorcet_rule(
    profile: &OrdinalProfile,
    variant: Variant,
) -> Result<DecisionOutcome, Error> {
    supermajority_condorcet_rule(profile, Delta::zero(), variant)
}

/// Elects the outright winner of the contested set at the given delta, or falls
/// back per `variant`.
pub fn supermajority_condorcet_rule(
    profile: &OrdinalProfile,
    delta: Delta,
    variant: Variant,
) -> Result<DecisionOutcome, Error> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let tally = pairwise_tally(profile);
    let th = Thresholds::new(tally.n, delta);
    let reality = profile.alts.reality_index();
    let mut tb = TraceBuilder::new(&profile.alts, delta, th);
    let contested = contested_mask(tally.view(), reality, th, &mut |st, c, d, s, w, ok| {
        tb.record(st, c, d, s, w, ok)
    });
    let winner = outright_winner_in(tally.view(), contested, th, &mut |st, c, d, s, w, ok| {
        tb.record(st, c, d, s, w, ok)
    });
    Ok(elect(&profile.alts, contested, winner, variant, tb.contests))
}

/// Runs the amendment vote over the contested set in the given order. The
/// order must list every alternative exactly once; the status quo opens as
/// incumbent regardless of its position.
pub fn amendment_agenda(
    profile: &OrdinalProfile,
    delta: Delta,
    variant: Variant,
    order: &[AltId],
) -> Result<DecisionOutcome, Error> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let m = profile.alts.len();
    let mut order_idx = Vec::with_capacity(m);
    for id in order {
        let idx = profile
            .alts
            .index_of(id)
            .ok_or(Error::BadAgendaOrder)?;
        order_idx.push(idx);
    }
    check_permutation(&order_idx, m).map_err(|_| Error::BadAgendaOrder)?;

    let tally = pairwise_tally(profile);
    let th = Thresholds::new(tally.n, delta);
    let reality = profile.alts.reality_index();
    let mut tb = TraceBuilder::new(&profile.alts, delta, th);
    let contested = contested_mask(tally.view(), reality, th, &mut |st, c, d, s, w, ok| {
        tb.record(st, c, d, s, w, ok)
    });
    let winner = agenda_survivor(
        tally.view(),
        reality,
        contested,
        th,
        &order_idx,
        &mut |st, c, d, s, w, ok| tb.record(st, c, d, s, w, ok),
    );
    Ok(elect(&profile.alts, contested, winner, variant, tb.contests))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alts(ids: &[&str]) -> AlternativeSet {
        AlternativeSet::new(ids.iter().map(|s| AltId::from(*s)).collect(), &AltId::reality())
            .unwrap()
    }

    fn profile(ids: &[&str], ballots: &[&[&str]]) -> OrdinalProfile {
        OrdinalProfile::new(
            alts(ids),
            ballots
                .iter()
                .map(|b| b.iter().map(|s| AltId::from(*s)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn d(s: &str) -> Delta {
        s.parse().unwrap()
    }

    fn winners(out: &DecisionOutcome) -> Vec<&str> {
        out.winners.iter().map(|w| w.0.as_str()).collect()
    }

    /// Three ballots cycling over a, b, c with the status quo last.
    fn cycle3() -> OrdinalProfile {
        profile(
            &["r", "a", "b", "c"],
            &[
                &["a", "b", "c", "r"],
                &["b", "c", "a", "r"],
                &["c", "a", "b", "r"],
            ],
        )
    }

    #[test]
    fn tally_counts_the_cycle() {
        let t = pairwise_tally(&cycle3());
        let idx = |s: &str| t.alts.index_of(&AltId::from(s)).unwrap();
        assert_eq!(t.count(idx("a"), idx("b")), 2);
        assert_eq!(t.count(idx("b"), idx("c")), 2);
        assert_eq!(t.count(idx("c"), idx("a")), 2);
        for x in ["a", "b", "c"] {
            assert_eq!(t.count(idx(x), idx("r")), 3);
        }
        assert_eq!(t.count(idx("r"), idx("a")), 0);
    }

    #[test]
    fn tally_cells_sum_to_n() {
        let t = pairwise_tally(&cycle3());
        let m = t.alts.len();
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    assert_eq!(t.count(a, b) + t.count(b, a), 3);
                }
            }
        }
        // And the validating constructor accepts its own output.
        PairwiseTally::from_counts(t.alts.clone(), t.n, t.counts.clone()).unwrap();
    }

    #[test]
    fn everything_viable_in_the_cycle() {
        let v = viable_set(&cycle3(), Delta::zero()).unwrap();
        assert_eq!(
            v.members,
            vec![AltId::from("r"), AltId::from("a"), AltId::from("b"), AltId::from("c")]
        );
    }

    #[test]
    fn single_voter_leaves_only_reality_viable() {
        let p = profile(&["r", "a", "b"], &[&["r", "a", "b"]]);
        let v = viable_set(&p, d("1/10")).unwrap();
        assert_eq!(v.members, vec![AltId::reality()]);
    }

    #[test]
    fn no_outright_winner_in_the_cycle() {
        let t = pairwise_tally(&cycle3());
        let subset: Vec<AltId> = ["r", "a", "b", "c"].iter().map(|s| AltId::from(*s)).collect();
        assert_eq!(delta_condorcet_winner(&t, &subset, Delta::zero()).unwrap(), None);
    }

    #[test]
    fn singleton_subset_is_its_own_winner() {
        let t = pairwise_tally(&cycle3());
        assert_eq!(
            delta_condorcet_winner(&t, &[AltId::reality()], d("1/6")).unwrap(),
            Some(AltId::reality())
        );
    }

    #[test]
    fn empty_subset_is_an_error() {
        let t = pairwise_tally(&cycle3());
        assert_eq!(
            delta_condorcet_winner(&t, &[], Delta::zero()),
            Err(Error::EmptySubset)
        );
    }

    #[test]
    fn base_rule_on_the_cycle() {
        let p = cycle3();
        let cons = base_condorcet_rule(&p, Variant::Conservative).unwrap();
        assert_eq!(winners(&cons), vec!["r"]);
        let perm = base_condorcet_rule(&p, Variant::Permissive).unwrap();
        assert_eq!(winners(&perm), vec!["a", "b", "c", "r"]);
    }

    #[test]
    fn nine_of_twelve_elect_a_at_delta_one_sixth() {
        let mut ballots: Vec<&[&str]> = vec![&["a", "r"]; 9];
        ballots.extend(std::iter::repeat(&["r", "a"] as &[&str]).take(3));
        let p = profile(&["r", "a"], &ballots);
        let out = supermajority_condorcet_rule(&p, d("1/6"), Variant::Conservative).unwrap();
        assert_eq!(winners(&out), vec!["a"]);
    }

    #[test]
    fn agenda_on_the_cycle_fails_the_final_check() {
        let p = cycle3();
        let order: Vec<AltId> = ["r", "a", "b", "c"].iter().map(|s| AltId::from(*s)).collect();
        // r -> a (3-0), b fails against a (1-2), c unseats a (2-1); the final
        // re-vote c against b fails (1-2), so no one is elected outright.
        let cons = amendment_agenda(&p, Delta::zero(), Variant::Conservative, &order).unwrap();
        assert_eq!(winners(&cons), vec!["r"]);
        let perm = amendment_agenda(&p, Delta::zero(), Variant::Permissive, &order).unwrap();
        assert_eq!(winners(&perm), vec!["a", "b", "c", "r"]);

        let stages: Vec<ContestStage> = cons.trace.iter().map(|c| c.stage).collect();
        assert!(stages.contains(&ContestStage::Viability));
        assert!(stages.contains(&ContestStage::Sequence));
        assert!(stages.contains(&ContestStage::FinalCheck));
    }

    #[test]
    fn agenda_blocks_a_survivor_that_never_beat_an_early_rival() {
        // Six voters split evenly between a and b, both far above the status
        // quo. With delta 1/6 a survives b's challenge 3-3 but never beats
        // b outright, so the re-vote must catch it and keep the status quo.
        let mut ballots: Vec<&[&str]> = vec![&["a", "b", "r"]; 3];
        ballots.extend(std::iter::repeat(&["b", "a", "r"] as &[&str]).take(3));
        let p = profile(&["r", "a", "b"], &ballots);
        let order: Vec<AltId> = ["r", "a", "b"].iter().map(|s| AltId::from(*s)).collect();
        let out = amendment_agenda(&p, d("1/6"), Variant::Conservative, &order).unwrap();
        assert_eq!(winners(&out), vec!["r"]);
        assert!(out
            .trace
            .iter()
            .any(|c| c.stage == ContestStage::FinalCheck && !c.cleared));
    }

    #[test]
    fn agenda_elects_the_outright_winner_whatever_the_order() {
        let mut ballots: Vec<&[&str]> = vec![&["a", "b", "r"]; 9];
        ballots.extend(std::iter::repeat(&["r", "b", "a"] as &[&str]).take(3));
        let p = profile(&["r", "a", "b"], &ballots);
        for order in [["r", "a", "b"], ["r", "b", "a"], ["b", "a", "r"]] {
            let ids: Vec<AltId> = order.iter().map(|s| AltId::from(*s)).collect();
            let out = amendment_agenda(&p, d("1/6"), Variant::Conservative, &ids).unwrap();
            assert_eq!(winners(&out), vec!["a"], "order {order:?}");
        }
    }

    #[test]
    fn agenda_order_must_cover_all_alternatives() {
        let p = cycle3();
        let short: Vec<AltId> = ["r", "a"].iter().map(|s| AltId::from(*s)).collect();
        assert_eq!(
            amendment_agenda(&p, Delta::zero(), Variant::Conservative, &short),
            Err(Error::BadAgendaOrder)
        );
        let dup: Vec<AltId> = ["r", "a", "a", "b"].iter().map(|s| AltId::from(*s)).collect();
        assert_eq!(
            amendment_agenda(&p, Delta::zero(), Variant::Conservative, &dup),
            Err(Error::BadAgendaOrder)
        );
    }

    #[test]
    fn restriction_keeps_relative_order() {
        let p = profile(&["r", "a", "b", "c"], &[&["c", "a", "r", "b"]]);
        let keep: Vec<AltId> = ["r", "c"].iter().map(|s| AltId::from(*s)).collect();
        let q = restrict_profile(&p, &keep).unwrap();
        assert_eq!(q.alternatives().ids(), keep.as_slice());
        assert_eq!(q.rankings(), &[vec![1, 0]]);

        let no_reality: Vec<AltId> = ["a", "b"].iter().map(|s| AltId::from(*s)).collect();
        assert!(restrict_profile(&p, &no_reality).is_err());
    }

    #[test]
    fn ballots_must_be_permutations() {
        let a = alts(&["r", "a", "b"]);
        let bad = vec![vec![AltId::from("r"), AltId::from("a"), AltId::from("a")]];
        assert!(matches!(
            OrdinalProfile::new(a, bad),
            Err(Error::InvalidBallot(_))
        ));
    }

    #[test]
    fn empty_profile_is_an_error() {
        let p = OrdinalProfile::from_index_ballots(alts(&["r", "a"]), vec![]).unwrap();
        assert_eq!(
            supermajority_condorcet_rule(&p, Delta::zero(), Variant::Conservative),
            Err(Error::EmptyProfile)
        );
    }

    #[test]
    fn exact_threshold_is_flagged_in_the_trace() {
        // Four voters, delta 1/4: weak bound is 3, strict bound is 4.
        // a sits exactly at 3: viable, but unable to win any contest.
        let mut ballots: Vec<&[&str]> = vec![&["a", "r"]; 3];
        ballots.push(&["r", "a"]);
        let p = profile(&["r", "a"], &ballots);
        let out = supermajority_condorcet_rule(&p, d("1/4"), Variant::Conservative).unwrap();
        assert_eq!(winners(&out), vec!["r"]);
        let viability = out
            .trace
            .iter()
            .find(|c| c.stage == ContestStage::Viability)
            .unwrap();
        assert!(viability.cleared && viability.at_threshold);
    }
}
