//! Rule outputs: elected sets plus the contests that produced them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::Rational;

/// Alternative identifier. Binary elections use the fixed ids
/// [`PROPOSAL_ID`] and [`REALITY_ID`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AltId(pub String);

pub const PROPOSAL_ID: &str = "p";
pub const REALITY_ID: &str = "r";

impl AltId {
    pub fn proposal() -> Self {
        AltId(PROPOSAL_ID.into())
    }

    pub fn reality() -> Self {
        AltId(REALITY_ID.into())
    }
}

impl From<&str> for AltId {
    fn from(s: &str) -> Self {
        AltId(s.into())
    }
}

impl fmt::Display for AltId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for AltId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Which phase of a rule evaluated this pairwise count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContestStage {
    /// Weak test against the status quo deciding entry into the contested set.
    Viability,
    /// Sequential challenger-versus-incumbent vote.
    Sequence,
    /// Re-vote of the surviving alternative against members it has not
    /// already beaten outright.
    FinalCheck,
    /// Pairwise scan while searching for an outright winner.
    CondorcetScan,
    /// The single vote of a binary election.
    Decision,
}

/// One evaluated pairwise comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contest {
    pub challenger: AltId,
    pub defender: AltId,
    /// Ballots preferring the challenger over the defender.
    pub support: u64,
    pub total: u64,
    pub delta: Rational,
    /// Viability uses the weak "at least" threshold; everything else strict.
    pub weak: bool,
    pub cleared: bool,
    /// Support sits exactly on the threshold, where the weak and strict
    /// readings disagree.
    pub at_threshold: bool,
    pub stage: ContestStage,
}

/// Elected set plus the full evaluation trace, in evaluation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub winners: BTreeSet<AltId>,
    pub trace: Vec<Contest>,
}

impl DecisionOutcome {
    pub fn new(winners: BTreeSet<AltId>, trace: Vec<Contest>) -> Self {
        debug_assert!(!winners.is_empty(), "a decision always elects something");
        Self { winners, trace }
    }

    pub fn single(winner: AltId, trace: Vec<Contest>) -> Self {
        Self::new(BTreeSet::from([winner]), trace)
    }

    /// The unique winner, if the outcome is a singleton.
    pub fn winner(&self) -> Option<&AltId> {
        if self.winners.len() == 1 {
            self.winners.iter().next()
        } else {
            None
        }
    }

    /// True when the rule elected exactly the status quo.
    pub fn keeps(&self, reality: &AltId) -> bool {
        self.winners.len() == 1 && self.winners.contains(reality)
    }
}
