//! Decisions that every Jeffrey posterior of `p` gets wrong.
//!
//! With `g = ln(p*/p)`, the expectation `E_{q_Π}[g]` falls short of
//! `E_{p*}[g] = D(p*‖p)` by a sum of symmetric block divergences, which is
//! strictly positive on every proper non-trivial `Π` when `p*/p` is
//! injective. Shifting `g` by a constant that sits strictly inside that gap
//! yields a decision `d` with `E_{p*}[d] > 0` and `E_{q_Π}[d] < 0` for all `Π`.

use serde::Serialize;

use crate::conditioning::{jeffrey_posterior, radon_nikodym};
use crate::error::{Error, Result};
use crate::model::{check_len, dot, expectation, ProbabilityVector, UtilityFunction};
use crate::partitions::SetPartition;
use crate::scan::{fold_partitions, BlockScratch, PosteriorKernel, ScanOptions};
use crate::tolerance::{sign_band, TAU_NUM};

/// Value substituted for `ln(p*(i)/p(i))` where `p*(i) = 0` in clamp mode.
pub const CLAMP_FLOOR: f64 = -50.0;

/// Default position of the shift constant inside `(M, E_{p*}[g])`.
pub const DEFAULT_EPS_FRACTION: f64 = 0.5;

/// Handling of outcomes where `p*` has no mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroPolicy {
    /// Reject with [`Error::PStarHasZero`].
    #[default]
    Strict,
    /// Replace `ln 0` by [`CLAMP_FLOOR`] and re-verify the result exhaustively.
    Clamp,
}

/// `g(i) = ln(p*(i) / p(i))`.
pub fn log_density_ratio(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    policy: ZeroPolicy,
) -> Result<UtilityFunction> {
    check_len(p.len(), p_star.len())?;
    p.require_positive_prior()?;
    if policy == ZeroPolicy::Strict {
        if let Some(i) = p_star.first_zero() {
            return Err(Error::PStarHasZero { outcome: i + 1 });
        }
    }
    let g = p_star
        .weights()
        .iter()
        .zip(p.weights())
        .map(|(a, b)| if *a > 0.0 { (a / b).ln() } else { CLAMP_FLOOR })
        .collect();
    UtilityFunction::new(g)
}

/// `D(q1‖q2) = Σ q1 ln(q1/q2)`, with `0 ln(0/x) = 0` and `+∞` when `q1`
/// charges an outcome that `q2` does not.
pub fn kl_divergence(q1: &ProbabilityVector, q2: &ProbabilityVector) -> Result<f64> {
    check_len(q1.len(), q2.len())?;
    Ok(kl_divergence_weights(q1.weights(), q2.weights()))
}

/// [`kl_divergence`] on raw weight slices of equal length (used for the
/// conditional distributions inside a block, which may have fewer than three
/// outcomes).
pub fn kl_divergence_weights(q1: &[f64], q2: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&a, &b) in q1.iter().zip(q2) {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return f64::INFINITY;
        }
        sum += a * (a / b).ln();
    }
    // Terms can cancel to a tiny negative through rounding.
    sum.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockGap {
    /// 0-based outcomes of the block.
    pub block: Vec<usize>,
    /// `p*(B)`.
    pub mass: f64,
    /// `D(p*_B‖p_B) + D(p_B‖p*_B)` for the conditionals on `B`.
    pub divergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapDecomposition {
    /// `E_{p*}[g] - E_{q_Π}[g]`.
    pub gap: f64,
    /// `Σ_B p*(B) (D(p*_B‖p_B) + D(p_B‖p*_B))`.
    pub block_sum: f64,
    pub per_block: Vec<BlockGap>,
}

pub fn posterior_gap_decomposition(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    partition: &SetPartition,
) -> Result<GapDecomposition> {
    let g = log_density_ratio(p_star, p, ZeroPolicy::Strict)?;
    let q = jeffrey_posterior(p_star, p, partition)?;
    let gap = expectation(&g, p_star)? - expectation(&g, &q)?;

    let per_block: Vec<BlockGap> = partition
        .blocks()
        .into_iter()
        .map(|block| {
            let mass = p_star.mass(&block);
            let prior = p.mass(&block);
            let cond_target: Vec<f64> = block.iter().map(|&i| p_star.weights()[i] / mass).collect();
            let cond_prior: Vec<f64> = block.iter().map(|&i| p.weights()[i] / prior).collect();
            let divergence =
                kl_divergence_weights(&cond_target, &cond_prior) + kl_divergence_weights(&cond_prior, &cond_target);
            BlockGap {
                block,
                mass,
                divergence,
            }
        })
        .collect();
    let block_sum = per_block.iter().map(|b| b.mass * b.divergence).sum();
    Ok(GapDecomposition {
        gap,
        block_sum,
        per_block,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionScore {
    pub partition: SetPartition,
    /// `E_{q_Π}[d]`.
    pub expectation: f64,
    /// `expectation <= 0` under the tolerance band.
    pub inaccessible: bool,
}

/// Outcome of scanning every proper non-trivial partition for one decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InaccessibilityReport {
    pub n: usize,
    pub partition_count: u64,
    /// Number of partitions with `E_{q_Π}[d] <= 0`.
    pub degree: u64,
    /// Every `E_{q_Π}[d]` is below the tolerance band.
    pub strong: bool,
    /// `E_{p*}[d] > 0` and `degree == partition_count`.
    pub inaccessible: bool,
    pub max_posterior_expectation: f64,
    pub e_pstar: f64,
    pub e_p: f64,
    /// Half-width of the band around zero that counts as zero.
    pub tolerance: f64,
    pub tolerance_deterministic: bool,
    /// Filled only when requested; empty otherwise.
    pub per_partition: Vec<PartitionScore>,
}

impl InaccessibilityReport {
    /// Partitions in the inaccessible set (requires a detailed report).
    pub fn inaccessible_set(&self) -> impl Iterator<Item = &SetPartition> {
        self.per_partition
            .iter()
            .filter(|s| s.inaccessible)
            .map(|s| &s.partition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    pub scan: ScanOptions,
    /// Keep one [`PartitionScore`] per partition in the report.
    pub keep_partitions: bool,
}

struct VerifyAcc {
    count: u64,
    degree: u64,
    strong: u64,
    max: f64,
    scores: Vec<PartitionScore>,
    scratch: BlockScratch,
}

pub fn verify_inaccessibility(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    d: &UtilityFunction,
    opts: &VerifyOptions,
) -> Result<InaccessibilityReport> {
    check_len(p.len(), p_star.len())?;
    check_len(p.len(), d.len())?;
    p.require_positive_prior()?;
    let n = p.len();
    let band = sign_band(d.values());
    let kernel = PosteriorKernel::new(p_star, p);
    let pd = kernel.prior_times(d.values());
    let keep = opts.keep_partitions;

    let acc = fold_partitions(
        n,
        &opts.scan,
        || VerifyAcc {
            count: 0,
            degree: 0,
            strong: 0,
            max: f64::NEG_INFINITY,
            scores: Vec::new(),
            scratch: BlockScratch::new(n),
        },
        |acc, labels, blocks| {
            let e = kernel.expectation(labels, blocks, &pd, &mut acc.scratch);
            acc.count += 1;
            let inaccessible = e <= band;
            if inaccessible {
                acc.degree += 1;
            }
            if e < -band {
                acc.strong += 1;
            }
            acc.max = acc.max.max(e);
            if keep {
                acc.scores.push(PartitionScore {
                    partition: partition_from_labels(labels),
                    expectation: e,
                    inaccessible,
                });
            }
        },
        |mut a, b| {
            a.count += b.count;
            a.degree += b.degree;
            a.strong += b.strong;
            a.max = a.max.max(b.max);
            a.scores.extend(b.scores);
            a
        },
    )?;

    let e_pstar = dot(d.values(), p_star.weights());
    let e_p = dot(d.values(), p.weights());
    Ok(InaccessibilityReport {
        n,
        partition_count: acc.count,
        degree: acc.degree,
        strong: acc.strong == acc.count,
        inaccessible: e_pstar > band && acc.degree == acc.count,
        max_posterior_expectation: acc.max,
        e_pstar,
        e_p,
        tolerance: band,
        tolerance_deterministic: opts.scan.tolerance_deterministic(),
        per_partition: acc.scores,
    })
}

pub(crate) fn partition_from_labels(labels: &[u8]) -> SetPartition {
    let rgs: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    SetPartition::from_rgs(&rgs).expect("scan yields proper canonical labels")
}

/// `max_Π E_{q_Π}[f]` and the first partition (in enumeration order) that
/// attains it.
pub fn max_posterior_expectation(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    f: &UtilityFunction,
    scan: &ScanOptions,
) -> Result<(f64, SetPartition)> {
    check_len(p.len(), p_star.len())?;
    check_len(p.len(), f.len())?;
    p.require_positive_prior()?;
    let kernel = PosteriorKernel::new(p_star, p);
    let pf = kernel.prior_times(f.values());
    let n = p.len();
    let (max, labels) = fold_partitions(
        n,
        scan,
        || (f64::NEG_INFINITY, Vec::<u8>::new(), BlockScratch::new(n)),
        |acc, labels, blocks| {
            let e = kernel.expectation(labels, blocks, &pf, &mut acc.2);
            if e > acc.0 {
                acc.0 = e;
                acc.1.clear();
                acc.1.extend_from_slice(labels);
            }
        },
        |a, b| if b.0 > a.0 { b } else { a },
    )
    .map(|(m, l, _)| (m, l))?;
    Ok((max, partition_from_labels(&labels)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstructOptions {
    pub policy: ZeroPolicy,
    pub scan: ScanOptions,
}

/// A strongly conditionally inaccessible decision and its certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Construction {
    /// `ln(p*/p)`, possibly clamped.
    pub g: UtilityFunction,
    /// `g - (M + ε)`.
    pub d: UtilityFunction,
    /// `f1 = d`.
    pub f1: UtilityFunction,
    /// `f2 ≡ 0`.
    pub f2: UtilityFunction,
    /// `max_Π E_{q_Π}[g]`.
    pub m: f64,
    /// Partition attaining `m`.
    pub argmax: SetPartition,
    /// `E_{p*}[g]`.
    pub e_pstar_g: f64,
    /// `E_{p*}[g] - M`.
    pub delta: f64,
    pub epsilon: f64,
    pub eps_fraction: f64,
    pub report: InaccessibilityReport,
}

pub fn construct_inaccessible_decision(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    eps_fraction: f64,
    opts: &ConstructOptions,
) -> Result<Construction> {
    if !(eps_fraction > 0.0 && eps_fraction < 1.0) {
        return Err(Error::OutOfRange(format!("eps fraction {eps_fraction}")));
    }
    let g = log_density_ratio(p_star, p, opts.policy)?;
    if !radon_nikodym(p_star, p)?.injective {
        return Err(Error::NotInBlindSpot);
    }
    opts.scan.check(p.len())?;

    let (m, argmax) = max_posterior_expectation(p_star, p, &g, &opts.scan)?;
    let e_pstar_g = dot(g.values(), p_star.weights());
    let delta = e_pstar_g - m;
    if delta <= TAU_NUM * 1f64.max(e_pstar_g.abs()) {
        return Err(Error::SeparationBelowTolerance { delta });
    }
    let epsilon = eps_fraction * delta;
    let d = g.shifted(m + epsilon);
    // Both margins, Δ - ε on p* and ε on the posteriors, must clear the sign band.
    if eps_fraction.min(1.0 - eps_fraction) * delta <= sign_band(d.values()) {
        return Err(Error::SeparationBelowTolerance { delta });
    }
    let report = verify_inaccessibility(
        p_star,
        p,
        &d,
        &VerifyOptions {
            scan: opts.scan,
            keep_partitions: false,
        },
    )?;

    if !(report.strong && report.inaccessible) {
        return Err(match (opts.policy, p_star.first_zero()) {
            (ZeroPolicy::Clamp, Some(i)) => Error::PStarHasZero { outcome: i + 1 },
            _ => Error::VerificationFailed(format!(
                "constructed decision has E_p*[d] = {:e} and max posterior expectation {:e}",
                report.e_pstar, report.max_posterior_expectation
            )),
        });
    }

    let n = p.len();
    Ok(Construction {
        f1: d.clone(),
        f2: UtilityFunction::zeros(n),
        g,
        d,
        m,
        argmax,
        e_pstar_g,
        delta,
        epsilon,
        eps_fraction,
        report,
    })
}
