use thiserror::Error;

/// Everything that can go wrong when building inputs or running a rule.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty electorate")]
    EmptyElectorate,
    #[error("empty profile")]
    EmptyProfile,
    #[error("genuine and sybil sets overlap")]
    OverlappingAgents,
    #[error("invalid rational: {0}")]
    InvalidRational(String),
    #[error("supermajority margin must lie in [0, 1/2], got {0}")]
    DeltaOutOfRange(String),
    #[error("sybil share must lie in [0, 1], got {0}")]
    SigmaOutOfRange(String),
    #[error("ballot count exceeds electorate size: {count} > {total}")]
    CountExceedsTotal { count: u64, total: u64 },
    #[error("division by zero: no genuine agents")]
    NoGenuineAgents,
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
    #[error("alternative set: {0}")]
    InvalidAlternatives(String),
    #[error("agenda order must cover every alternative exactly once")]
    BadAgendaOrder,
    #[error("subset of alternatives is empty")]
    EmptySubset,
    #[error("suppression removes all votes")]
    SuppressionRemovesAll,
    #[error("profile size mismatch: expected {expected} ballots, got {actual}")]
    ProfileSizeMismatch { expected: usize, actual: usize },
    #[error("honest profile is not the genuine-agent restriction of the full profile")]
    RestrictionMismatch,
    #[error("enumeration needs {required} instances, budget allows {budget}")]
    BudgetExceeded { required: u64, budget: u64 },
    #[error("no electorate of at most {n_max} agents realizes the sybil share exactly (denominator {denom})")]
    UnrealizableSigma { denom: u64, n_max: u64 },
    #[error("unknown audit property {0:?}; expected safety, liveness, or less-conservative")]
    InvalidProperty(String),
    #[error("unknown variant {0:?}; expected conservative or permissive")]
    InvalidVariant(String),
    #[error("invalid inspection sample: {0}")]
    InvalidSample(String),
    #[error("tail probability must lie in (0, 1), got {0}")]
    InvalidTailProbability(f64),
}
