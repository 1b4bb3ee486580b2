//! Agents and the genuine/sybil partition.
//!
//! Voting rules never see the partition; it exists so the audit harness can
//! compare what a rule elects on the full electorate against what the
//! genuine agents alone would have elected.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::Rational;
use crate::threshold::SigmaBound;

/// Opaque voter identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u32);

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent#{}", self.0)
    }
}

/// A disjoint partition of the voters into genuine agents and sybils.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Electorate {
    genuine: BTreeSet<AgentId>,
    sybils: BTreeSet<AgentId>,
}

impl Electorate {
    pub fn new(genuine: BTreeSet<AgentId>, sybils: BTreeSet<AgentId>) -> Result<Self, Error> {
        if genuine.is_empty() && sybils.is_empty() {
            return Err(Error::EmptyElectorate);
        }
        if !genuine.is_disjoint(&sybils) {
            return Err(Error::OverlappingAgents);
        }
        Ok(Self { genuine, sybils })
    }

    /// Canonical electorate with ids `0..genuine` genuine and
    /// `genuine..genuine+sybils` sybil. Ballot vectors are aligned with the
    /// id order, so "the first h ballots are genuine" holds by construction.
    pub fn with_counts(genuine: u64, sybils: u64) -> Result<Self, Error> {
        let g: BTreeSet<AgentId> = (0..genuine as u32).map(AgentId).collect();
        let s: BTreeSet<AgentId> = (genuine as u32..(genuine + sybils) as u32)
            .map(AgentId)
            .collect();
        Self::new(g, s)
    }

    pub fn len(&self) -> u64 {
        (self.genuine.len() + self.sybils.len()) as u64
    }

    pub fn is_empty(&self) -> bool {
        false // ruled out at construction
    }

    pub fn genuine_count(&self) -> u64 {
        self.genuine.len() as u64
    }

    pub fn sybil_count(&self) -> u64 {
        self.sybils.len() as u64
    }

    pub fn is_sybil(&self, id: AgentId) -> bool {
        self.sybils.contains(&id)
    }

    /// All agents in ascending id order — the order ballots are listed in.
    pub fn agents(&self) -> Vec<AgentId> {
        let mut v: Vec<AgentId> = self.genuine.iter().chain(self.sybils.iter()).copied().collect();
        v.sort_unstable();
        v
    }

    /// Positions (in ballot order) held by genuine agents.
    pub fn genuine_positions(&self) -> Vec<usize> {
        self.agents()
            .iter()
            .enumerate()
            .filter(|(_, id)| !self.is_sybil(**id))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Exact fraction of sybils in the electorate.
pub fn sybil_fraction(electorate: &Electorate) -> SigmaBound {
    let share = Rational::new(electorate.sybil_count() as i128, electorate.len() as i128)
        .expect("electorate is nonempty");
    SigmaBound::new(share).expect("count ratio lies in [0, 1]")
}
