//! Jeffrey conditioning of a prior `p` on the block masses of a target `p*`,
//! and membership in the Bayes blind spot of `p`.
//!
//! `p*` is reachable as the Jeffrey posterior of `p` on some partition iff the
//! density ratio `r = p*/p` is constant on every block of that partition. So
//! `p*` is unreachable on every proper non-trivial partition (it lies in the
//! blind spot) exactly when `r` is injective.

use serde::Serialize;

use crate::error::Result;
use crate::model::{check_len, ProbabilityVector, UtilityFunction};
use crate::partitions::{enumerate_proper_nontrivial, level_set_partition, SetPartition};
use crate::tolerance::{max_abs_diff, TAU_NUM};

fn check_pair(p_star: &ProbabilityVector, p: &ProbabilityVector) -> Result<()> {
    check_len(p.len(), p_star.len())?;
    p.require_positive_prior()
}

/// `q_Π(i) = p*(B) p(i) / p(B)` for `i ∈ B ∈ Π`.
pub fn jeffrey_posterior(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    partition: &SetPartition,
) -> Result<ProbabilityVector> {
    check_pair(p_star, p)?;
    check_len(p.len(), partition.len())?;
    let blocks = partition.blocks();
    let mut q = vec![0.0; p.len()];
    for block in &blocks {
        let target = p_star.mass(block);
        let prior = p.mass(block);
        for &i in block {
            q[i] = target * p.weights()[i] / prior;
        }
    }
    Ok(ProbabilityVector::from_distribution(q))
}

/// Componentwise `p*(i) / p(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadonNikodymRatio {
    pub values: Vec<f64>,
    /// Pairwise distinct: sorted adjacent gaps all exceed `TAU_NUM`.
    pub injective: bool,
}

pub fn radon_nikodym(p_star: &ProbabilityVector, p: &ProbabilityVector) -> Result<RadonNikodymRatio> {
    check_pair(p_star, p)?;
    let values: Vec<f64> = p_star.weights().iter().zip(p.weights()).map(|(a, b)| a / b).collect();
    let injective = is_injective(&values, TAU_NUM);
    Ok(RadonNikodymRatio { values, injective })
}

/// Sorted adjacent gaps all strictly above `tol`.
pub fn is_injective(values: &[f64], tol: f64) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).all(|w| w[1] - w[0] > tol)
}

/// Whether `values` is constant (spread at most `TAU_NUM`) on every block.
pub fn constant_on_blocks(values: &[f64], partition: &SetPartition) -> bool {
    partition.blocks().iter().all(|block| {
        let (lo, hi) = block.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(values[i]), hi.max(values[i]))
        });
        hi - lo <= TAU_NUM
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlindSpot {
    pub member: bool,
    /// For non-members, a proper non-trivial partition whose posterior is `p*`.
    pub witness: Option<SetPartition>,
}

pub fn in_blind_spot(p_star: &ProbabilityVector, p: &ProbabilityVector) -> Result<BlindSpot> {
    let ratio = radon_nikodym(p_star, p)?;
    if ratio.injective {
        return Ok(BlindSpot {
            member: true,
            witness: None,
        });
    }
    let level_sets = UtilityFunction::new(ratio.values).expect("finite ratios");
    if let Ok(partition) = level_set_partition(&level_sets) {
        if posterior_equals_target(p_star, p, &partition)? {
            return Ok(BlindSpot {
                member: false,
                witness: Some(partition),
            });
        }
    }
    // Constant ratio (one level set), or tolerance chaining produced a grouping
    // that does not reproduce p*: take the first partition that does.
    for partition in enumerate_proper_nontrivial(p.len())? {
        if posterior_equals_target(p_star, p, &partition)? {
            return Ok(BlindSpot {
                member: false,
                witness: Some(partition),
            });
        }
    }
    // Near ties chained past tolerance: membership still follows injectivity,
    // but no posterior reproduces p* closely enough to serve as witness.
    Ok(BlindSpot {
        member: false,
        witness: None,
    })
}

/// `max_i |q_Π(i) - p*(i)| <= TAU_NUM`.
pub fn posterior_equals_target(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    partition: &SetPartition,
) -> Result<bool> {
    let q = jeffrey_posterior(p_star, p, partition)?;
    Ok(max_abs_diff(q.weights(), p_star.weights()) <= TAU_NUM)
}
