//! Brute-force audits of the safety, liveness, and conservatism claims.
//!
//! Each audit enumerates a finite universe of elections, partitions, and
//! vote assignments, reports its size up front, and returns either a clean
//! verdict or the first counterexample in enumeration order. Witnesses
//! carry complete instances so a verdict can be replayed through the public
//! rule functions, independent of the enumeration kernels used here.

mod binary;
mod enumerate;
mod ordinal;
mod parameter;

pub use binary::{
    check_liveness_binary, check_safety_instance, exhaustive_safety_binary, find_tightness_witness,
    tightness_boundary, BinaryLivenessWitness, BinaryRule, BinarySafetyWitness, DeltaPolicy,
};
pub use enumerate::multiset_count;
pub use ordinal::{
    agenda_conformance, check_liveness_ordinal, exhaustive_safety_ordinal, ConformanceWitness,
    OrdinalLivenessWitness, OrdinalSafetyWitness,
};
pub use parameter::{
    check_liveness_parameter, default_grid, exhaustive_safety_parameter, less_conservative_check,
    ParamRule, ParameterDominanceWitness, ParameterLivenessWitness, ParameterSafetyWitness,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Which guarantee an audit examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Safety,
    Liveness,
    LessConservative,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Safety => f.write_str("safety"),
            Property::Liveness => f.write_str("liveness"),
            Property::LessConservative => f.write_str("less-conservative"),
        }
    }
}

impl FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "safety" => Ok(Property::Safety),
            "liveness" => Ok(Property::Liveness),
            "less-conservative" => Ok(Property::LessConservative),
            other => Err(Error::InvalidProperty(other.to_string())),
        }
    }
}

/// Bounds of one finite audit universe, fixed before enumeration starts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceUniverse {
    /// Largest electorate size enumerated.
    pub n_max: u64,
    /// Strict upper bound on the sybil share of the generated partitions,
    /// when the universe constrains it at all.
    pub sigma: Option<crate::threshold::SigmaBound>,
    /// What the agents submit: "binary votes", "rankings over m
    /// alternatives", "ideal points on a k-point grid".
    pub ballot_space: String,
    /// Hard cap on the instance count; enumeration refuses to start past
    /// it and reports the size it would have needed.
    pub budget: u64,
}

/// Result of one audit run. `witness` is present exactly when the property
/// failed; replaying the rules on it reproduces the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict<W> {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<W>,
    /// Instances the enumeration covers, counted before running.
    pub universe_size: u64,
}

impl<W> AuditVerdict<W> {
    pub fn passed(property: Property, universe_size: u64) -> Self {
        Self {
            property,
            holds: true,
            witness: None,
            universe_size,
        }
    }

    pub fn violated(property: Property, universe_size: u64, witness: W) -> Self {
        Self {
            property,
            holds: false,
            witness: Some(witness),
            universe_size,
        }
    }
}

pub(crate) fn budget_gate(required: u64, budget: u64) -> Result<(), Error> {
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}
