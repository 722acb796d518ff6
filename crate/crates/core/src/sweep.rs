//! Seeded Monte-Carlo sweeps over random `(p*, p)` pairs drawn from a
//! symmetric Dirichlet distribution. Frequencies only; nothing here says
//! anything about the size of the blind spot beyond the sampled evidence.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::conditioning::radon_nikodym;
use crate::construct::{construct_inaccessible_decision, ConstructOptions, DEFAULT_EPS_FRACTION};
use crate::degrees::{degree, posterior_classes};
use crate::error::{Error, Result};
use crate::model::{ProbabilityVector, UtilityFunction};
use crate::monotonicity::{appendix_certificate, check_monotonicity};
use crate::scan::ScanOptions;

/// Priors with any weight below this are redrawn.
pub const PRIOR_FLOOR: f64 = 1e-6;

const MAX_PRIOR_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// Symmetric Dirichlet concentration; 1 is uniform on the simplex.
    pub alpha: f64,
    pub eps_fraction: f64,
    #[serde(skip)]
    pub scan: ScanOptions,
}

impl SweepConfig {
    pub fn new(n: usize, samples: u64, seed: u64) -> Self {
        Self {
            n,
            samples,
            seed,
            alpha: 1.0,
            eps_fraction: DEFAULT_EPS_FRACTION,
            scan: ScanOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub alpha: f64,
    /// Samples whose ratio `p*/p` is injective.
    pub blind_spot_count: u64,
    pub blind_spot_frequency: f64,
    /// Blind-spot samples for which a strong decision was built and certified.
    pub constructed: u64,
    /// Blind-spot samples too close to degeneracy to construct.
    pub degenerate: u64,
    pub construction_failures: u64,
    pub certificate_failures: u64,
    /// Must stay 0.
    pub theorem_violations: u64,
    /// Degree of one uniformly random `d ∈ [-1, 1]^n` per sample.
    pub degree_histogram: BTreeMap<u64, u64>,
    /// Samples where two partitions share a posterior.
    pub multiplicity_collisions: u64,
    pub prior_redraws: u64,
}

fn dirichlet(rng: &mut ChaCha8Rng, gamma: &Gamma<f64>, n: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            return draws.into_iter().map(|x| x / sum).collect();
        }
    }
}

pub fn sweep(config: &SweepConfig) -> Result<SweepSummary> {
    let n = config.n;
    if !(3..=10).contains(&n) {
        return Err(Error::OutOfRange(format!("sweep outcome count {n} (allowed 3..=10)")));
    }
    if config.samples == 0 {
        return Err(Error::OutOfRange("sample count 0".into()));
    }
    let gamma = Gamma::new(config.alpha, 1.0)
        .map_err(|_| Error::OutOfRange(format!("Dirichlet concentration {}", config.alpha)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scan = config.scan;
    let construct_opts = ConstructOptions {
        scan,
        ..Default::default()
    };

    let mut summary = SweepSummary {
        n,
        samples: config.samples,
        seed: config.seed,
        alpha: config.alpha,
        blind_spot_count: 0,
        blind_spot_frequency: 0.0,
        constructed: 0,
        degenerate: 0,
        construction_failures: 0,
        certificate_failures: 0,
        theorem_violations: 0,
        degree_histogram: BTreeMap::new(),
        multiplicity_collisions: 0,
        prior_redraws: 0,
    };

    for _ in 0..config.samples {
        let p_star = ProbabilityVector::new(dirichlet(&mut rng, &gamma, n))?;
        let mut redraws = 0;
        let p = loop {
            let w = dirichlet(&mut rng, &gamma, n);
            if w.iter().all(|&x| x >= PRIOR_FLOOR) {
                break ProbabilityVector::new(w)?;
            }
            redraws += 1;
            if redraws >= MAX_PRIOR_REDRAWS {
                return Err(Error::OutOfRange(format!(
                    "Dirichlet concentration {} rarely yields priors above the floor",
                    config.alpha
                )));
            }
        };
        summary.prior_redraws += redraws as u64;
        let d_random: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();

        if radon_nikodym(&p_star, &p)?.injective {
            summary.blind_spot_count += 1;
            match construct_inaccessible_decision(&p_star, &p, config.eps_fraction, &construct_opts) {
                Ok(c) => {
                    summary.constructed += 1;
                    match check_monotonicity(&p_star, &p, &c.d, &scan) {
                        Ok(m) if m.hypotheses_hold => {}
                        Ok(_) => summary.construction_failures += 1,
                        Err(Error::TheoremViolation { .. }) => summary.theorem_violations += 1,
                        Err(e) => return Err(e),
                    }
                }
                Err(Error::SeparationBelowTolerance { .. } | Error::PStarHasZero { .. }) => summary.degenerate += 1,
                Err(Error::VerificationFailed(_)) => summary.construction_failures += 1,
                Err(e) => return Err(e),
            }
            match appendix_certificate(&p_star, &p) {
                Ok(_) | Err(Error::NotInjective | Error::PStarHasZero { .. }) => {}
                Err(Error::VerificationFailed(_)) => summary.certificate_failures += 1,
                Err(e) => return Err(e),
            }
        }

        let k = degree(&p_star, &p, &UtilityFunction::new(d_random)?, &scan)?;
        *summary.degree_histogram.entry(k).or_insert(0) += 1;

        if posterior_classes(&p_star, &p, &scan)?
            .iter()
            .any(|c| c.multiplicity > 1)
        {
            summary.multiplicity_collisions += 1;
        }
    }
    summary.blind_spot_frequency = summary.blind_spot_count as f64 / config.samples as f64;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_summary() {
        let a = sweep(&SweepConfig::new(3, 1, 42)).unwrap();
        let b = sweep(&SweepConfig::new(3, 1, 42)).unwrap();
        assert_eq!(a, b);
        let c = sweep(&SweepConfig::new(4, 50, 1)).unwrap();
        assert_eq!(c.degree_histogram.values().sum::<u64>(), 50);
        assert!((0.0..=1.0).contains(&c.blind_spot_frequency));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(sweep(&SweepConfig::new(2, 1, 0)), Err(Error::OutOfRange(_))));
        assert!(matches!(sweep(&SweepConfig::new(11, 1, 0)), Err(Error::OutOfRange(_))));
        assert!(matches!(sweep(&SweepConfig::new(3, 0, 0)), Err(Error::OutOfRange(_))));
        let mut bad = SweepConfig::new(3, 1, 0);
        bad.alpha = -1.0;
        assert!(matches!(sweep(&bad), Err(Error::OutOfRange(_))));
    }
}
