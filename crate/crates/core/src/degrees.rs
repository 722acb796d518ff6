//! Degree of conditional inaccessibility and the spectrum of achievable
//! degrees for a fixed pair `(p*, p)`.
//!
//! Distinct partitions can share a Jeffrey posterior, so partitions are
//! grouped into posterior classes with multiplicities. A random direction `u`
//! separates the classes, the perturbed score `g_η = g + η u` orders them
//! strictly, and thresholding `g_η` between consecutive class scores realizes
//! every cumulative multiplicity `K_ℓ` as a degree.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conditioning::radon_nikodym;
use crate::construct::{
    log_density_ratio, partition_from_labels, verify_inaccessibility, InaccessibilityReport, VerifyOptions, ZeroPolicy,
};
use crate::error::{Error, Result};
use crate::model::{check_len, dot, ProbabilityVector, UtilityFunction};
use crate::partitions::SetPartition;
use crate::scan::{fold_partitions, BlockScratch, PosteriorKernel, ScanOptions};
use crate::tolerance::{max_abs_diff, TAU_DEDUP, TAU_SEP};

/// Random directions tried before giving up on separating the classes.
pub const MAX_SEPARATION_ATTEMPTS: usize = 64;

/// Times `η` is halved before giving up on the perturbed score.
pub const MAX_ETA_HALVINGS: usize = 60;

pub const DEFAULT_ETA_FRACTION: f64 = 0.5;

/// Partitions `Π` with `E_{q_Π}[d] <= 0`, in enumeration order.
pub fn inaccessible_set(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    d: &UtilityFunction,
    scan: &ScanOptions,
) -> Result<Vec<SetPartition>> {
    let report = verify_inaccessibility(
        p_star,
        p,
        d,
        &VerifyOptions {
            scan: *scan,
            keep_partitions: true,
        },
    )?;
    Ok(report.inaccessible_set().cloned().collect())
}

/// `|inaccessible_set|`, counted without storing partitions.
pub fn degree(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    d: &UtilityFunction,
    scan: &ScanOptions,
) -> Result<u64> {
    let report = verify_inaccessibility(
        p_star,
        p,
        d,
        &VerifyOptions {
            scan: *scan,
            keep_partitions: false,
        },
    )?;
    Ok(report.degree)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorClass {
    pub posterior: Vec<f64>,
    pub multiplicity: u64,
    /// First partition in enumeration order with this posterior.
    pub representative: SetPartition,
}

struct ClassAcc {
    index: HashMap<Vec<i64>, usize>,
    classes: Vec<(Vec<f64>, u64, Vec<u8>)>,
    q: Vec<f64>,
    scratch: BlockScratch,
}

impl ClassAcc {
    fn insert(&mut self, q: &[f64], count: u64, labels: &[u8]) {
        let key = grid_key(q);
        match self.index.get(&key) {
            Some(&i) => self.classes[i].1 += count,
            None => {
                self.index.insert(key, self.classes.len());
                self.classes.push((q.to_vec(), count, labels.to_vec()));
            }
        }
    }
}

fn grid_key(q: &[f64]) -> Vec<i64> {
    q.iter().map(|x| (x / TAU_DEDUP).round() as i64).collect()
}

/// The distinct Jeffrey posteriors over all proper non-trivial partitions,
/// with multiplicities, in order of first appearance.
///
/// Posteriors within `TAU_DEDUP` (max-norm) are one class; closeness is
/// closed transitively.
pub fn posterior_classes(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    scan: &ScanOptions,
) -> Result<Vec<PosteriorClass>> {
    check_len(p.len(), p_star.len())?;
    p.require_positive_prior()?;
    let n = p.len();
    let kernel = PosteriorKernel::new(p_star, p);
    let acc = fold_partitions(
        n,
        scan,
        || ClassAcc {
            index: HashMap::new(),
            classes: Vec::new(),
            q: vec![0.0; n],
            scratch: BlockScratch::new(n),
        },
        |acc, labels, blocks| {
            let mut q = std::mem::take(&mut acc.q);
            kernel.posterior_into(labels, blocks, &mut q, &mut acc.scratch);
            acc.insert(&q, 1, labels);
            acc.q = q;
        },
        |mut a, b| {
            for (q, count, labels) in b.classes {
                a.insert(&q, count, &labels);
            }
            a
        },
    )?;
    Ok(merge_near_duplicates(acc.classes))
}

/// Unions grid buckets whose posteriors lie within `TAU_DEDUP` of each other.
fn merge_near_duplicates(classes: Vec<(Vec<f64>, u64, Vec<u8>)>) -> Vec<PosteriorClass> {
    let len = classes.len();
    let mut parent: Vec<usize> = (0..len).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut by_first: Vec<usize> = (0..len).collect();
    by_first.sort_by(|&a, &b| classes[a].0[0].total_cmp(&classes[b].0[0]));
    for w in 0..len {
        let a = by_first[w];
        for &b in &by_first[w + 1..] {
            if classes[b].0[0] - classes[a].0[0] > TAU_DEDUP {
                break;
            }
            if max_abs_diff(&classes[a].0, &classes[b].0) <= TAU_DEDUP {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                // The earlier class (in first-appearance order) stays the root.
                if ra != rb {
                    let (lo, hi) = (ra.min(rb), ra.max(rb));
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut out: Vec<PosteriorClass> = Vec::new();
    let mut slot = vec![usize::MAX; len];
    for i in 0..len {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            let (q, _, labels) = &classes[root];
            out.push(PosteriorClass {
                posterior: q.clone(),
                multiplicity: 0,
                representative: partition_from_labels(labels),
            });
        }
        out[slot[root]].multiplicity += classes[i].1;
    }
    out
}

/// A direction `u ∈ [-1, 1]^n` on which the given posteriors have pairwise
/// distinct expectations, at least `TAU_SEP` apart. Sampled from a seeded
/// RNG; the same seed gives the same `u`.
pub fn find_separating_direction(posteriors: &[Vec<f64>], seed: u64) -> Result<UtilityFunction> {
    let n = posteriors
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::OutOfRange("empty class list".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SEPARATION_ATTEMPTS {
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let scores: Vec<f64> = posteriors.iter().map(|q| dot(q, &u)).collect();
        if min_gap(&scores) > TAU_SEP {
            return UtilityFunction::new(u);
        }
    }
    Err(Error::SeparationFailed {
        attempts: MAX_SEPARATION_ATTEMPTS,
    })
}

fn min_gap(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedScore {
    /// `g + η u`.
    pub g_eta: UtilityFunction,
    pub eta: f64,
    /// `E_{p*}[g] - max_Π E_{q_Π}[g]`.
    pub delta: f64,
    /// `max_q |E_q[u]| + |E_{p*}[u]|`.
    pub r_bound: f64,
    /// `E_{p*}[g_η]`.
    pub e_pstar_score: f64,
    /// Times `η` was halved to pass verification.
    pub halvings: usize,
}

/// `g_η = g + η u` with `η = η_fraction · δ / (2R)`, verified so that class
/// scores are pairwise distinct and all lie strictly below `E_{p*}[g_η]`.
pub fn perturbed_score(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    u: &UtilityFunction,
    eta_fraction: f64,
    scan: &ScanOptions,
) -> Result<PerturbedScore> {
    let g = blind_spot_log_ratio(p_star, p)?;
    let classes = posterior_classes(p_star, p, scan)?;
    perturb(p_star, &g, &classes, u, eta_fraction)
}

fn blind_spot_log_ratio(p_star: &ProbabilityVector, p: &ProbabilityVector) -> Result<UtilityFunction> {
    let g = log_density_ratio(p_star, p, ZeroPolicy::Strict)?;
    if !radon_nikodym(p_star, p)?.injective {
        return Err(Error::NotInBlindSpot);
    }
    Ok(g)
}

fn perturb(
    p_star: &ProbabilityVector,
    g: &UtilityFunction,
    classes: &[PosteriorClass],
    u: &UtilityFunction,
    eta_fraction: f64,
) -> Result<PerturbedScore> {
    check_len(g.len(), u.len())?;
    if !(0.0..1.0).contains(&eta_fraction) {
        return Err(Error::OutOfRange(format!("eta fraction {eta_fraction}")));
    }
    let e_pstar_g = dot(g.values(), p_star.weights());
    let max_g = classes
        .iter()
        .map(|c| dot(g.values(), &c.posterior))
        .fold(f64::NEG_INFINITY, f64::max);
    let delta = e_pstar_g - max_g;
    if delta <= 0.0 {
        return Err(Error::SeparationBelowTolerance { delta });
    }
    let r_bound = classes
        .iter()
        .map(|c| dot(u.values(), &c.posterior).abs())
        .fold(0.0, f64::max)
        + dot(u.values(), p_star.weights()).abs();
    let mut eta = if r_bound > 0.0 {
        eta_fraction * delta / (2.0 * r_bound)
    } else {
        // u is invisible to every posterior and to p*; any η leaves scores unchanged.
        eta_fraction * delta
    };

    let retries = if eta_fraction == 0.0 { 0 } else { MAX_ETA_HALVINGS };
    for halvings in 0..=retries {
        let g_eta = g.add_scaled(u, eta)?;
        let scores: Vec<f64> = classes.iter().map(|c| dot(g_eta.values(), &c.posterior)).collect();
        let e_pstar_score = dot(g_eta.values(), p_star.weights());
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min_gap(&scores) > TAU_SEP && e_pstar_score - top > TAU_SEP {
            return Ok(PerturbedScore {
                g_eta,
                eta,
                delta,
                r_bound,
                e_pstar_score,
                halvings,
            });
        }
        eta /= 2.0;
    }
    Err(Error::SeparationFailed { attempts: retries + 1 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumClass {
    pub posterior: Vec<f64>,
    pub multiplicity: u64,
    /// `E_q[g_η]`.
    pub score: f64,
    pub representative: SetPartition,
}

/// Posterior classes ordered by perturbed score, with cumulative
/// multiplicities and the resulting achievable degrees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSpectrum {
    pub n: usize,
    pub classes: Vec<SpectrumClass>,
    /// `K_1 < ... < K_L`.
    pub cumulative: Vec<u64>,
    /// `{0, K_1, ..., K_L}`.
    pub achievable: Vec<u64>,
    pub eta: f64,
    pub seed: u64,
    pub u: UtilityFunction,
    pub g_eta: UtilityFunction,
    pub e_pstar_score: f64,
    pub delta: f64,
}

impl DegreeSpectrum {
    pub fn all_multiplicities_one(&self) -> bool {
        self.classes.iter().all(|c| c.multiplicity == 1)
    }

    pub fn partition_count(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub seed: u64,
    pub eta_fraction: f64,
    pub scan: ScanOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            eta_fraction: DEFAULT_ETA_FRACTION,
            scan: ScanOptions::default(),
        }
    }
}

pub fn achievable_degrees(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    opts: &SpectrumOptions,
) -> Result<DegreeSpectrum> {
    let g = blind_spot_log_ratio(p_star, p)?;
    let classes = posterior_classes(p_star, p, &opts.scan)?;
    let reps: Vec<Vec<f64>> = classes.iter().map(|c| c.posterior.clone()).collect();
    let u = find_separating_direction(&reps, opts.seed)?;
    let perturbed = perturb(p_star, &g, &classes, &u, opts.eta_fraction)?;

    let mut ordered: Vec<SpectrumClass> = classes
        .into_iter()
        .map(|c| SpectrumClass {
            score: dot(perturbed.g_eta.values(), &c.posterior),
            posterior: c.posterior,
            multiplicity: c.multiplicity,
            representative: c.representative,
        })
        .collect();
    ordered.sort_by(|a, b| a.score.total_cmp(&b.score));
    let cumulative: Vec<u64> = ordered
        .iter()
        .scan(0u64, |sum, c| {
            *sum += c.multiplicity;
            Some(*sum)
        })
        .collect();
    let achievable = std::iter::once(0).chain(cumulative.iter().copied()).collect();

    Ok(DegreeSpectrum {
        n: p.len(),
        classes: ordered,
        cumulative,
        achievable,
        eta: perturbed.eta,
        seed: opts.seed,
        u,
        g_eta: perturbed.g_eta,
        e_pstar_score: perturbed.e_pstar_score,
        delta: perturbed.delta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    pub k: u64,
    /// Number of lowest-scoring classes below the threshold.
    pub level: usize,
    /// Threshold constant; `d = g_η - c`.
    pub c: f64,
    pub d: UtilityFunction,
    pub report: InaccessibilityReport,
}

/// A decision `d = g_η - c` with `E_{p*}[d] > 0` and degree exactly `k`.
pub fn realize_degree(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    k: u64,
    opts: &SpectrumOptions,
) -> Result<(Realization, DegreeSpectrum)> {
    let spectrum = achievable_degrees(p_star, p, opts)?;
    let realization = realize_from_spectrum(p_star, p, &spectrum, k, &opts.scan)?;
    Ok((realization, spectrum))
}

/// [`realize_degree`] against a precomputed spectrum of the same pair.
pub fn realize_from_spectrum(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    spectrum: &DegreeSpectrum,
    k: u64,
    scan: &ScanOptions,
) -> Result<Realization> {
    let level = if k == 0 {
        0
    } else {
        match spectrum.cumulative.iter().position(|&x| x == k) {
            Some(j) => j + 1,
            None => {
                return Err(Error::NotAchievable {
                    k,
                    achievable: spectrum.achievable.clone(),
                })
            }
        }
    };
    let scores: Vec<f64> = spectrum.classes.iter().map(|c| c.score).collect();
    let c = if level == 0 {
        scores[0] - 1.0
    } else if level == scores.len() {
        (scores[level - 1] + spectrum.e_pstar_score) / 2.0
    } else {
        (scores[level - 1] + scores[level]) / 2.0
    };
    let d = spectrum.g_eta.shifted(c);
    let report = verify_inaccessibility(
        p_star,
        p,
        &d,
        &VerifyOptions {
            scan: *scan,
            keep_partitions: false,
        },
    )?;
    if report.degree != k || report.e_pstar <= report.tolerance {
        return Err(Error::VerificationFailed(format!(
            "threshold {c:e} gives degree {} (wanted {k}) and E_p*[d] = {:e}",
            report.degree, report.e_pstar
        )));
    }
    Ok(Realization { k, level, c, d, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(w: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(w.to_vec()).unwrap()
    }

    fn worked() -> (ProbabilityVector, ProbabilityVector) {
        (pv(&[0.5, 0.3, 0.2]), ProbabilityVector::uniform(3).unwrap())
    }

    fn g_minus(c: f64) -> UtilityFunction {
        let (ps, p) = worked();
        log_density_ratio(&ps, &p, ZeroPolicy::Strict).unwrap().shifted(c)
    }

    #[test]
    fn inaccessible_set_examples() {
        let (ps, p) = worked();
        let set = inaccessible_set(&ps, &p, &g_minus(0.03), &ScanOptions::default()).unwrap();
        let names: Vec<String> = set.iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["{1,2}|{3}", "{1,3}|{2}"]);
        assert_eq!(degree(&ps, &p, &g_minus(0.03), &ScanOptions::default()).unwrap(), 2);

        let plus = UtilityFunction::constant(3, 1.0);
        assert!(inaccessible_set(&ps, &p, &plus, &ScanOptions::default())
            .unwrap()
            .is_empty());
        assert_eq!(degree(&ps, &p, &plus, &ScanOptions::default()).unwrap(), 0);

        // M + ε from the worked construction.
        assert_eq!(degree(&ps, &p, &g_minus(0.058823), &ScanOptions::default()).unwrap(), 3);
    }

    #[test]
    fn classes_examples() {
        let (ps, p) = worked();
        let classes = posterior_classes(&ps, &p, &ScanOptions::default()).unwrap();
        assert_eq!(classes.len(), 3);
        assert!(classes.iter().all(|c| c.multiplicity == 1));

        let q = pv(&[0.1, 0.2, 0.3, 0.4]);
        let classes = posterior_classes(&q, &q, &ScanOptions::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].multiplicity, 13);
    }

    #[test]
    fn separating_direction_examples() {
        assert!(find_separating_direction(&[vec![0.2, 0.3, 0.5]], 0).is_ok());
        let classes = vec![vec![0.4, 0.4, 0.2], vec![0.35, 0.3, 0.35], vec![0.5, 0.25, 0.25]];
        let first: Vec<f64> = classes.iter().map(|q| q[0]).collect();
        assert!(min_gap(&first) > TAU_SEP, "u = e_1 separates");
        let u = find_separating_direction(&classes, 7).unwrap();
        let scores: Vec<f64> = classes.iter().map(|q| dot(q, u.values())).collect();
        assert!(min_gap(&scores) > TAU_SEP);
        assert_eq!(u, find_separating_direction(&classes, 7).unwrap());
        let dup = vec![vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]];
        assert_eq!(
            find_separating_direction(&dup, 0),
            Err(Error::SeparationFailed {
                attempts: MAX_SEPARATION_ATTEMPTS
            })
        );
    }

    #[test]
    fn perturbed_score_examples() {
        let (ps, p) = worked();
        let scan = ScanOptions::default();
        let zero = UtilityFunction::zeros(3);
        let s = perturbed_score(&ps, &p, &zero, 0.5, &scan).unwrap();
        assert_eq!(
            s.g_eta.values(),
            log_density_ratio(&ps, &p, ZeroPolicy::Strict).unwrap().values()
        );

        // Adversarial direction pushing the best posterior up against p*.
        let u = UtilityFunction::new(vec![-1.0, 1.0, 1.0]).unwrap();
        let s = perturbed_score(&ps, &p, &u, 0.999, &scan).unwrap();
        let classes = posterior_classes(&ps, &p, &scan).unwrap();
        let top = classes
            .iter()
            .map(|c| dot(s.g_eta.values(), &c.posterior))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(top < s.e_pstar_score);
        assert!(s.eta > 0.0 && s.eta < s.delta / (2.0 * s.r_bound));
    }

    #[test]
    fn worked_spectrum() {
        let (ps, p) = worked();
        let spectrum = achievable_degrees(&ps, &p, &SpectrumOptions::default()).unwrap();
        assert_eq!(spectrum.achievable, vec![0, 1, 2, 3]);
        assert!(spectrum.all_multiplicities_one());
        assert!(spectrum.classes.windows(2).all(|w| w[0].score < w[1].score));
        assert_eq!(
            achievable_degrees(&p, &p, &SpectrumOptions::default()),
            Err(Error::NotInBlindSpot)
        );
    }

    #[test]
    fn worked_realizations() {
        let (ps, p) = worked();
        let opts = SpectrumOptions::default();
        for k in 0..=3 {
            let (r, _) = realize_degree(&ps, &p, k, &opts).unwrap();
            assert_eq!(r.report.degree, k);
            assert!(r.report.e_pstar > 0.0);
        }
        let (r, spectrum) = realize_degree(&ps, &p, 2, &opts).unwrap();
        assert!(r.c > spectrum.classes[1].score && r.c < spectrum.classes[2].score);
        assert_abs_diff_eq!(r.report.e_pstar, spectrum.e_pstar_score - r.c, epsilon = 1e-12);
        assert!(matches!(
            realize_degree(&ps, &p, 5, &opts),
            Err(Error::NotAchievable { k: 5, .. })
        ));
    }

    /// With `a_i = p_i (r_i - 1) = (-a, a, a, -a)` the pairings `{1,2}{3,4}`
    /// and `{1,3}{2,4}` both have block ratio 1, so both posteriors are `p`
    /// even though `r` is injective.
    #[test]
    fn injective_ratio_with_repeated_posterior() {
        let p = pv(&[0.1, 0.2, 0.3, 0.4]);
        let ps = pv(&[0.05, 0.25, 0.35, 0.35]);
        assert!(radon_nikodym(&ps, &p).unwrap().injective);
        let classes = posterior_classes(&ps, &p, &ScanOptions::default()).unwrap();
        assert_eq!(classes.iter().map(|c| c.multiplicity).sum::<u64>(), 13);
        let repeated: Vec<&PosteriorClass> = classes.iter().filter(|c| c.multiplicity > 1).collect();
        assert_eq!(repeated.len(), 1);
        assert_eq!(repeated[0].multiplicity, 2);
        assert!(max_abs_diff(&repeated[0].posterior, p.weights()) < 1e-12);

        let spectrum = achievable_degrees(&ps, &p, &SpectrumOptions::default()).unwrap();
        assert!(!spectrum.all_multiplicities_one());
        assert_eq!(spectrum.achievable.len(), 13);
        for &k in &spectrum.achievable {
            let r = realize_from_spectrum(&ps, &p, &spectrum, k, &ScanOptions::default()).unwrap();
            assert_eq!(r.report.degree, k);
        }
        let missing = (0..=13).find(|k| !spectrum.achievable.contains(k)).unwrap();
        assert!(matches!(
            realize_from_spectrum(&ps, &p, &spectrum, missing, &ScanOptions::default()),
            Err(Error::NotAchievable { .. })
        ));
    }

    #[test]
    fn degree_is_monotone_in_threshold() {
        let ps = pv(&[0.1, 0.25, 0.05, 0.4, 0.2]);
        let p = pv(&[0.3, 0.1, 0.2, 0.15, 0.25]);
        let spectrum = achievable_degrees(&ps, &p, &SpectrumOptions::default()).unwrap();
        let lo = spectrum.classes[0].score - 0.1;
        let hi = spectrum.e_pstar_score;
        let mut last = 0;
        for step in 0..=200 {
            let c = lo + (hi - lo) * step as f64 / 200.0;
            let k = degree(&ps, &p, &spectrum.g_eta.shifted(c), &ScanOptions::default()).unwrap();
            assert!(k >= last);
            last = k;
        }
        assert_eq!(last, 50);
    }
}
