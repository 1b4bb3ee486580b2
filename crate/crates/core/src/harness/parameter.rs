//! Audits of the parameter-update rules on a discrete grid of ideal
//! points.
//!
//! Instances put every agent's ideal point and the current value on a
//! small grid, so the enumeration (multisets per side of the partition) is
//! exact. Each audit takes the bound the rule trims by and, for safety,
//! the penetration actually generated, which may deliberately exceed the
//! rule's bound to demonstrate where the guarantee stops.

use serde::{Deserialize, Serialize};

use super::enumerate::{compositions, multiset_count};
use super::{budget_gate, AuditVerdict, Property};
use crate::electorate::Electorate;
use crate::error::Error;
use crate::exact::Rational;
use crate::parameter::{
    median_base_rule, simple_update, suppress_outer_sigma, Direction, MedianBand,
    ParameterProfile,
};
use crate::threshold::SigmaBound;

/// The grid the audits default to: five equally spaced values.
pub fn default_grid() -> Vec<Rational> {
    (0..5).map(Rational::from_integer).collect()
}

fn canonical_grid(grid: &[Rational]) -> Vec<Rational> {
    assert!(!grid.is_empty(), "value grid must be nonempty");
    let mut g = grid.to_vec();
    g.sort_unstable();
    g.dedup();
    g
}

fn values_of(grid: &[Rational], counts: &[u32]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(counts.iter().map(|&c| c as usize).sum());
    for (i, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            out.push(grid[i]);
        }
    }
    out
}

fn share_below(s: u64, n: u64, bound: SigmaBound) -> bool {
    Rational::new(s as i128, n as i128).expect("positive electorate") < bound.value()
}

/// A parameter-update rule under audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamRule {
    /// Median update with the suspect tail of the votes suppressed.
    SuppressOuter { sigma: SigmaBound },
    /// Nearest ideal point past the current value, behind a
    /// `(1/2 + sigma/2)` supermajority gate.
    SimpleUpdate { sigma: SigmaBound },
}

impl ParamRule {
    pub fn apply(&self, profile: &ParameterProfile) -> Result<Rational, Error> {
        match self {
            ParamRule::SuppressOuter { sigma } => suppress_outer_sigma(profile, *sigma),
            ParamRule::SimpleUpdate { sigma } => simple_update(profile, *sigma),
        }
    }
}

/// A safety violation: the trimmed-median rule moved the value somewhere
/// the genuine agents' median band does not admit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSafetyWitness {
    pub electorate: Electorate,
    /// Full profile, genuine ideal points first.
    pub profile: ParameterProfile,
    /// The bound the rule trimmed by.
    pub sigma: SigmaBound,
    pub rule_output: Rational,
    /// Acceptable updates per the genuine ballots alone.
    pub base: MedianBand,
}

/// Checks the suppress-outer rule (trimming by `sigma`) against the median
/// band of the genuine ideal points, over every electorate of up to
/// `n_max` agents with sybil share strictly below `penetration`, every
/// on-grid value assignment, and every on-grid current value.
///
/// Passing `penetration` above `sigma` deliberately overruns the rule's
/// tolerance; expect a witness.
pub fn exhaustive_safety_parameter(
    sigma: SigmaBound,
    penetration: SigmaBound,
    n_max: u64,
    grid: &[Rational],
    budget: u64,
) -> Result<AuditVerdict<ParameterSafetyWitness>, Error> {
    let grid = canonical_grid(grid);
    let g = grid.len();
    let mut universe: u64 = 0;
    for n in 1..=n_max {
        for s in 0..n {
            if !share_below(s, n, penetration) {
                continue;
            }
            universe +=
                g as u64 * multiset_count(n - s, g as u64) * multiset_count(s, g as u64);
        }
    }
    budget_gate(universe, budget)?;

    for n in 1..=n_max {
        for s in 0..n {
            if !share_below(s, n, penetration) {
                continue;
            }
            let h = n - s;
            let sybil_side = compositions(s as u32, g);
            for &r in &grid {
                for g_counts in compositions(h as u32, g) {
                    let genuine_ideals = values_of(&grid, &g_counts);
                    let band = median_base_rule(&ParameterProfile::new(r, genuine_ideals.clone()))?;
                    for s_counts in &sybil_side {
                        let mut ideals = genuine_ideals.clone();
                        ideals.extend(values_of(&grid, s_counts));
                        let profile = ParameterProfile::new(r, ideals);
                        let output = suppress_outer_sigma(&profile, sigma)?;
                        if output == r || band.admits(output) {
                            continue;
                        }
                        return Ok(AuditVerdict::violated(
                            Property::Safety,
                            universe,
                            ParameterSafetyWitness {
                                electorate: Electorate::with_counts(h, s)?,
                                profile,
                                sigma,
                                rule_output: output,
                                base: band,
                            },
                        ));
                    }
                }
            }
        }
    }
    Ok(AuditVerdict::passed(Property::Safety, universe))
}

/// A liveness failure: a sybil assignment under which no genuine
/// assignment moves the value to the target side of the current one. The
/// attempted profile shows every genuine agent at the grid extreme on that
/// side; the audit also confirmed every on-grid genuine multiset fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterLivenessWitness {
    pub electorate: Electorate,
    pub direction: Direction,
    pub sybil_ideals: Vec<Rational>,
    /// Full profile, unanimous genuine ideal points first.
    pub attempted: ParameterProfile,
    pub rule_output: Rational,
}

/// Checks that the suppress-outer rule (trimming by `sigma`) lets the
/// genuine agents move the value strictly above and strictly below any
/// on-grid current value, whatever the sybils (share strictly below
/// `sigma`) report. Directions with no grid value on that side are
/// skipped. Unanimity at each side value is tried first, then every
/// genuine multiset.
pub fn check_liveness_parameter(
    sigma: SigmaBound,
    n_max: u64,
    grid: &[Rational],
    budget: u64,
) -> Result<AuditVerdict<ParameterLivenessWitness>, Error> {
    let grid = canonical_grid(grid);
    let g = grid.len();
    let mut universe: u64 = 0;
    for n in 1..=n_max {
        for s in 0..n {
            if !share_below(s, n, sigma) {
                continue;
            }
            let h = n - s;
            for &r in &grid {
                let sides = grid.iter().filter(|v| **v > r).count().min(1)
                    + grid.iter().filter(|v| **v < r).count().min(1);
                universe += sides as u64
                    * multiset_count(s, g as u64)
                    * multiset_count(h, g as u64);
            }
        }
    }
    budget_gate(universe, budget)?;

    for n in 1..=n_max {
        for s in 0..n {
            if !share_below(s, n, sigma) {
                continue;
            }
            let h = n - s;
            let sybil_side = compositions(s as u32, g);
            let genuine_side = compositions(h as u32, g);
            for &r in &grid {
                for direction in [Direction::Up, Direction::Down] {
                    let side: Vec<Rational> = match direction {
                        Direction::Up => grid.iter().copied().filter(|v| *v > r).collect(),
                        Direction::Down => grid.iter().copied().filter(|v| *v < r).collect(),
                        Direction::Stay => unreachable!(),
                    };
                    if side.is_empty() {
                        continue;
                    }
                    let moved = |output: Rational| match direction {
                        Direction::Up => output > r,
                        Direction::Down => output < r,
                        Direction::Stay => unreachable!(),
                    };
                    for s_counts in &sybil_side {
                        let sybil_ideals = values_of(&grid, s_counts);
                        let outcome_of = |genuine_ideals: &[Rational]| {
                            let mut ideals = genuine_ideals.to_vec();
                            ideals.extend(sybil_ideals.iter().copied());
                            suppress_outer_sigma(&ParameterProfile::new(r, ideals), sigma)
                        };
                        let mut live = false;
                        for &q in &side {
                            if moved(outcome_of(&vec![q; h as usize])?) {
                                live = true;
                                break;
                            }
                        }
                        if !live {
                            live = genuine_side.iter().try_fold(false, |found, g_counts| {
                                if found {
                                    return Ok::<bool, Error>(true);
                                }
                                Ok(moved(outcome_of(&values_of(&grid, g_counts))?))
                            })?;
                        }
                        if live {
                            continue;
                        }
                        let extreme = match direction {
                            Direction::Up => *side.last().expect("side is nonempty"),
                            _ => *side.first().expect("side is nonempty"),
                        };
                        let mut ideals = vec![extreme; h as usize];
                        ideals.extend(sybil_ideals.iter().copied());
                        let attempted = ParameterProfile::new(r, ideals);
                        let rule_output = suppress_outer_sigma(&attempted, sigma)?;
                        debug_assert!(!moved(rule_output));
                        return Ok(AuditVerdict::violated(
                            Property::Liveness,
                            universe,
                            ParameterLivenessWitness {
                                electorate: Electorate::with_counts(h, s)?,
                                direction,
                                sybil_ideals,
                                attempted,
                                rule_output,
                            },
                        ));
                    }
                }
            }
        }
    }
    Ok(AuditVerdict::passed(Property::Liveness, universe))
}

/// An instance where `rule_b`'s update is not between the current value
/// and `rule_a`'s update: the claimed conservatism ordering fails there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterDominanceWitness {
    pub profile: ParameterProfile,
    pub rule_a: ParamRule,
    pub rule_b: ParamRule,
    pub output_a: Rational,
    pub output_b: Rational,
}

/// Checks that on every on-grid instance (up to `n_max` agents, every
/// on-grid current value) `rule_b` moves in the same direction as `rule_a`
/// and at most as far: r <= B <= A or A <= B <= r.
pub fn less_conservative_check(
    rule_a: ParamRule,
    rule_b: ParamRule,
    n_max: u64,
    grid: &[Rational],
    budget: u64,
) -> Result<AuditVerdict<ParameterDominanceWitness>, Error> {
    let grid = canonical_grid(grid);
    let g = grid.len();
    let mut universe: u64 = 0;
    for n in 1..=n_max {
        universe += g as u64 * multiset_count(n, g as u64);
    }
    budget_gate(universe, budget)?;

    for n in 1..=n_max {
        for &r in &grid {
            for counts in compositions(n as u32, g) {
                let profile = ParameterProfile::new(r, values_of(&grid, &counts));
                let a = rule_a.apply(&profile)?;
                let b = rule_b.apply(&profile)?;
                let ordered = (r <= b && b <= a) || (a <= b && b <= r);
                if ordered {
                    continue;
                }
                return Ok(AuditVerdict::violated(
                    Property::LessConservative,
                    universe,
                    ParameterDominanceWitness {
                        profile,
                        rule_a,
                        rule_b,
                        output_a: a,
                        output_b: b,
                    },
                ));
            }
        }
    }
    Ok(AuditVerdict::passed(Property::LessConservative, universe))
}
