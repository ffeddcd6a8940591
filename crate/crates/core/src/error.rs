use thiserror::Error;

use crate::atomic_system::Atom;
use crate::weight_profile::ProfileError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("atom {0} does not belong to the system")]
    UnknownAtom(Atom),
    #[error("predecessor ratios are unbounded along {witness:?}; not a measurable system")]
    UnboundedRatio { witness: Vec<Atom> },
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("system has a conservative (cycle) orbit")]
    NotDissipative,
    #[error("atoms {0} and {1} lie on a common orbit, so the set is not wandering")]
    NotWandering(Atom, Atom),
    #[error("orbit {0} has no atom in the proposed generating set")]
    NotGenerating(usize),
    #[error("the inverse map violates the measure-ratio bound: {0}")]
    NotInvertibleSystem(String),
    #[error("operation needs a bijective system, got an injective forward one")]
    ForwardOnly,
    #[error("operation is only defined for bijective systems")]
    BijectiveOnly,
    #[error("summability condition required: {0}")]
    ScRequired(String),
    #[error("no tail certificate for {0}")]
    TailNotCertified(String),
    #[error("cannot approximate target: {0}")]
    CannotApproximate(String),
    #[error("ratio hypothesis violated at n = {n}: alpha ratio exceeds the bound")]
    RatioHypothesisViolated { n: i64 },
    #[error("invalid digit {digit} at position {position} (alphabet size {size})")]
    InvalidDigit { position: usize, digit: u64, size: u64 },
    #[error("no return found within {0} steps")]
    NotFoundWithinBound(u64),
    #[error("invalid affine map: {0}")]
    InvalidMap(String),
    #[error("fixed-point neighbourhood covers the set")]
    FixedPointCoversB,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
