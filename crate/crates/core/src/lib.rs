//! Voting rules that hold up when part of the electorate is fake.
//!
//! The model: an electorate V splits into genuine agents and sybils, with
//! the sybil share bounded by some sigma, and every election features a
//! distinguished status quo alternative r that wins by default. The rules
//! here buy safety (sybils cannot move the outcome anywhere the genuine
//! agents' own base rule would not go) at the price of a supermajority
//! margin, and the library makes that price explicit:
//!
//! - binary proposal-vs-status-quo supermajority rules, the sigma/2
//!   minimal safe margin, and the conservatism ratio rho(sigma, delta);
//! - ranked elections: reality-viable sets, delta-supermajority Condorcet
//!   winners, and the sequential amendment agenda that implements them;
//! - single-peaked parameter updates: the reality-aware median, the
//!   suppress-outer trimmed variant, and their conservatism ordering;
//! - an upper confidence bound for sigma from inspecting a sample of
//!   identities;
//! - a brute-force harness that enumerates every small instance and
//!   either confirms a safety/liveness claim or returns a replayable
//!   counterexample.
//!
//! Vote counts and thresholds are compared in exact integer arithmetic;
//! shares and margins are exact rationals throughout.

pub mod electorate;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod harness;
pub mod ordinal;
pub mod outcome;
pub mod parameter;
pub mod proposal;
pub mod threshold;

pub use electorate::{sybil_fraction, AgentId, Electorate};
pub use error::Error;
pub use estimate::{
    binomial_lower_tail, sigma_point_plus_margin, sigma_upper_bound, InspectionSample,
};
pub use exact::Rational;
pub use harness::{
    agenda_conformance, check_liveness_binary, check_liveness_ordinal, check_liveness_parameter,
    check_safety_instance, default_grid, exhaustive_safety_binary, exhaustive_safety_ordinal,
    exhaustive_safety_parameter, find_tightness_witness, less_conservative_check, multiset_count,
    tightness_boundary, AuditVerdict, BinaryLivenessWitness, BinaryRule, BinarySafetyWitness,
    ConformanceWitness, DeltaPolicy, InstanceUniverse, OrdinalLivenessWitness,
    OrdinalSafetyWitness, ParamRule, ParameterDominanceWitness, ParameterLivenessWitness,
    ParameterSafetyWitness, Property,
};
pub use ordinal::{
    amendment_agenda, base_condorcet_rule, delta_condorcet_winner, pairwise_tally,
    restrict_profile, supermajority_condorcet_rule, viable_set, AlternativeSet, OrdinalProfile,
    PairwiseTally, Variant, ViableSet,
};
pub use outcome::{AltId, Contest, ContestStage, DecisionOutcome};
pub use parameter::{
    median_base_rule, reality_aware_median, simple_update, suppress_outer_sigma, suppressed_sets,
    Direction, MedianBand, ParameterProfile, SuppressedSets,
};
pub use proposal::{
    conservatism, majority_base_rule, min_safe_delta, supermajority_rule, BinaryProfile,
    BinaryVote, ConservatismPoint,
};
pub use threshold::{
    at_exact_threshold, strict_supermajority, weak_supermajority, Delta, SigmaBound,
};
