//! Conditionally inaccessible decisions in finite probability spaces.
//!
//! An agent holds a prior `p` over outcomes `{1, ..., n}`; the world runs on
//! an objective `p*`. The agent learns the `p*`-mass of every block of some
//! partition and updates by Jeffrey conditioning. A decision `d = f1 - f2`
//! that is good under `p*` (`E_{p*}[d] > 0`) is *conditionally inaccessible*
//! when every such update still rejects it.
//!
//! The crate builds such decisions, verifies them by scanning every proper
//! non-trivial partition, computes the spectrum of achievable degrees of
//! inaccessibility, and checks numerically that an informed update can never
//! turn a decision that `p` already gets right into a wrong one.
//!
//! ```
//! use inacc_core::{construct_inaccessible_decision, ConstructOptions, ProbabilityVector};
//!
//! let p_star = ProbabilityVector::new(vec![0.5, 0.3, 0.2]).unwrap();
//! let p = ProbabilityVector::uniform(3).unwrap();
//! let c = construct_inaccessible_decision(&p_star, &p, 0.5, &ConstructOptions::default()).unwrap();
//! assert!(c.report.strong && c.report.e_pstar > 0.0);
//! ```

pub mod conditioning;
pub mod construct;
pub mod degrees;
pub mod error;
pub mod model;
pub mod monotonicity;
pub mod partitions;
pub mod scan;
pub mod sweep;
pub mod tolerance;

pub use conditioning::{
    constant_on_blocks, in_blind_spot, is_injective, jeffrey_posterior, posterior_equals_target, radon_nikodym,
    BlindSpot, RadonNikodymRatio,
};
pub use construct::{
    construct_inaccessible_decision, kl_divergence, log_density_ratio, max_posterior_expectation,
    posterior_gap_decomposition, verify_inaccessibility, ConstructOptions, Construction, GapDecomposition,
    InaccessibilityReport, PartitionScore, VerifyOptions, ZeroPolicy,
};
pub use degrees::{
    achievable_degrees, degree, find_separating_direction, inaccessible_set, perturbed_score, posterior_classes,
    realize_degree, realize_from_spectrum, DegreeSpectrum, PerturbedScore, PosteriorClass, Realization, SpectrumClass,
    SpectrumOptions,
};
pub use error::{Error, Result};
pub use model::{expectation, validate_context, DecisionContext, ProbabilityVector, UtilityFunction, ValidatedContext};
pub use monotonicity::{
    appendix_certificate, check_monotonicity, epsilon_mixture_check, AppendixCertificate, MixtureCheck,
    MonotonicityCheck,
};
pub use partitions::{
    adjacent_pair_partition, bell_number, enumerate_proper_nontrivial, level_set_partition, proper_partition_count,
    NotProper, SetPartition,
};
pub use scan::ScanOptions;
pub use sweep::{sweep, SweepConfig, SweepSummary};
