use thiserror::Error;

/// Errors raised by the library. Outcome labels in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} outcomes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least 3 outcomes, got {0}")]
    TooSmall(usize),

    #[error("not a probability vector: {0}")]
    NotAProbability(String),

    #[error("utility value at outcome {outcome} is not finite")]
    NonFiniteUtility { outcome: usize },

    #[error("prior assigns zero mass to outcome {outcome}")]
    PriorHasZero { outcome: usize },

    #[error("objective probability assigns zero mass to outcome {outcome}")]
    PStarHasZero { outcome: usize },

    #[error("trivial decision context: f1 > f2 at every outcome")]
    TrivialContext,

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("not in the Bayes blind spot: the density ratio p*/p is not injective")]
    NotInBlindSpot,

    #[error("the ratio p/p* is not injective")]
    NotInjective,

    #[error("separation {delta:e} is below tolerance; input too close to degeneracy")]
    SeparationBelowTolerance { delta: f64 },

    #[error("refusing to scan all partitions of {n} outcomes (limit is {max})")]
    RefusedTooLarge { n: usize, max: usize },

    #[error("no separating direction found after {attempts} attempts")]
    SeparationFailed { attempts: usize },

    #[error("degree {k} is not achievable; achievable degrees are {achievable:?}")]
    NotAchievable { k: u64, achievable: Vec<u64> },

    /// An informed-decision monotonicity violation. This can only come from
    /// numerical error beyond tolerance or a bug.
    #[error("theorem violation: hypotheses hold but E_p[d] = {e_p:e} is not negative (E_p*[d] = {e_pstar:e})")]
    TheoremViolation { e_p: f64, e_pstar: f64 },

    #[error("post-hoc verification failed: {0}")]
    VerificationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
