//! Informed decisions are never worse: if every Jeffrey posterior of `p`
//! rejects a decision that `p*` accepts, then `p` itself rejects it too.
//!
//! Besides the direct check, this module rebuilds the numeric certificate
//! behind the claim. Sorting outcomes by `r̃ = p/p*`, the adjacent-pair
//! posteriors `q_m` satisfy `p - p* = Σ t_m (q_m - p*)` with every `t_m >= 1`,
//! so `E_p[d] = Σ t_m E_{q_m}[d] - (t - 1) E_{p*}[d] < 0`. Zeros in `p*` are
//! handled by mixing in `p`, which scales every relevant expectation by
//! `1 - ε`.

use serde::{Serialize, Serializer};

use crate::conditioning::{is_injective, jeffrey_posterior};
use crate::construct::{verify_inaccessibility, VerifyOptions};
use crate::error::{Error, Result};
use crate::model::{check_len, dot, ProbabilityVector, UtilityFunction};
use crate::partitions::{adjacent_pair_partition, enumerate_proper_nontrivial};
use crate::scan::ScanOptions;
use crate::tolerance::{max_abs_diff, TAU_NUM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityCheck {
    /// `E_{p*}[d] > 0` and `E_{q_Π}[d] <= 0` for every partition.
    pub hypotheses_hold: bool,
    /// `E_p[d] < 0`.
    pub conclusion_holds: bool,
    pub e_p: f64,
    pub e_pstar: f64,
    pub max_posterior_expectation: f64,
}

/// Checks the hypotheses exhaustively and the conclusion directly. A case
/// where the hypotheses hold but the conclusion fails is returned as
/// [`Error::TheoremViolation`].
pub fn check_monotonicity(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    d: &UtilityFunction,
    scan: &ScanOptions,
) -> Result<MonotonicityCheck> {
    let report = verify_inaccessibility(
        p_star,
        p,
        d,
        &VerifyOptions {
            scan: *scan,
            keep_partitions: false,
        },
    )?;
    let check = MonotonicityCheck {
        hypotheses_hold: report.inaccessible,
        conclusion_holds: report.e_p < 0.0,
        e_p: report.e_p,
        e_pstar: report.e_pstar,
        max_posterior_expectation: report.max_posterior_expectation,
    };
    if check.hypotheses_hold && !check.conclusion_holds {
        return Err(Error::TheoremViolation {
            e_p: check.e_p,
            e_pstar: check.e_pstar,
        });
    }
    Ok(check)
}

/// Every intermediate quantity of the adjacent-pair decomposition, in the
/// sorted ordering (index `m` refers to the pair of sorted positions
/// `m, m+1`, 0-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixCertificate {
    /// Outcomes sorted by increasing `p(i)/p*(i)`; 1-based when serialized.
    #[serde(serialize_with = "one_based")]
    pub ordering: Vec<usize>,
    /// `p(i)/p*(i)` in the original outcome order.
    pub ratio: Vec<f64>,
    /// `S_m = Σ_{i<=m} (p*(i) - p(i))` over sorted positions.
    pub s: Vec<f64>,
    /// `A_m = q_m(m+1) - p*(m+1)`.
    pub a: Vec<f64>,
    /// `t_m = S_m / A_m`.
    pub t: Vec<f64>,
    pub t_sum: f64,
    /// `‖p - p* - Σ t_m (q_m - p*)‖_∞`.
    pub decomposition_residual: f64,
    /// `‖p - p* - Σ S_m (e_{m+1} - e_m)‖_∞`.
    pub telescoping_residual: f64,
    /// `max_m ‖q_m - p* - A_m (e_{m+1} - e_m)‖_∞`.
    pub shift_residual: f64,
    /// `max_m max_{i ∉ {m, m+1}} |q_m(i) - p*(i)|`.
    pub shift_support_residual: f64,
}

fn one_based<S: Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|i| i + 1))
}

impl AppendixCertificate {
    /// The invariants the decomposition must satisfy.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (m, ((&s, &a), &t)) in self.s.iter().zip(&self.a).zip(&self.t).enumerate() {
            if s <= 0.0 {
                out.push(format!("S_{} = {s:e} is not positive", m + 1));
            }
            if a <= 0.0 {
                out.push(format!("A_{} = {a:e} is not positive", m + 1));
            }
            if t < 1.0 - TAU_NUM {
                out.push(format!("t_{} = {t} is below 1", m + 1));
            }
        }
        if self.t_sum <= 1.0 {
            out.push(format!("t sums to {} <= 1", self.t_sum));
        }
        if self.decomposition_residual > TAU_NUM {
            out.push(format!("decomposition residual {:e}", self.decomposition_residual));
        }
        if self.telescoping_residual > TAU_NUM {
            out.push(format!("telescoping residual {:e}", self.telescoping_residual));
        }
        out
    }
}

pub fn appendix_certificate(p_star: &ProbabilityVector, p: &ProbabilityVector) -> Result<AppendixCertificate> {
    check_len(p.len(), p_star.len())?;
    p.require_positive_prior()?;
    if let Some(i) = p_star.first_zero() {
        return Err(Error::PStarHasZero { outcome: i + 1 });
    }
    let n = p.len();
    let (ps, pw) = (p_star.weights(), p.weights());
    let ratio: Vec<f64> = pw.iter().zip(ps).map(|(a, b)| a / b).collect();
    if !is_injective(&ratio, TAU_NUM) {
        return Err(Error::NotInjective);
    }
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by(|&a, &b| ratio[a].total_cmp(&ratio[b]));

    // Sorted copies: position k holds outcome ordering[k].
    let sorted_ps: Vec<f64> = ordering.iter().map(|&i| ps[i]).collect();
    let sorted_p: Vec<f64> = ordering.iter().map(|&i| pw[i]).collect();
    let diff: Vec<f64> = sorted_p.iter().zip(&sorted_ps).map(|(a, b)| a - b).collect();

    let mut s = Vec::with_capacity(n - 1);
    let mut running = 0.0;
    for k in 0..n - 1 {
        running += sorted_ps[k] - sorted_p[k];
        s.push(running);
    }

    let mut a = Vec::with_capacity(n - 1);
    let mut shifts: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut shift_residual: f64 = 0.0;
    let mut shift_support_residual: f64 = 0.0;
    for m in 0..n - 1 {
        let pair = adjacent_pair_partition(m + 1, n)?.permuted(&ordering)?;
        let q = jeffrey_posterior(p_star, p, &pair)?;
        let shift: Vec<f64> = ordering.iter().map(|&i| q.weights()[i] - ps[i]).collect();
        let a_m = shift[m + 1];
        for (k, &x) in shift.iter().enumerate() {
            let expected = if k == m + 1 {
                a_m
            } else if k == m {
                -a_m
            } else {
                shift_support_residual = shift_support_residual.max(x.abs());
                0.0
            };
            shift_residual = shift_residual.max((x - expected).abs());
        }
        a.push(a_m);
        shifts.push(shift);
    }

    let t: Vec<f64> = s.iter().zip(&a).map(|(s, a)| s / a).collect();
    let t_sum = t.iter().sum();

    let mut combo = vec![0.0; n];
    let mut telescoped = vec![0.0; n];
    for m in 0..n - 1 {
        for k in 0..n {
            combo[k] += t[m] * shifts[m][k];
        }
        telescoped[m + 1] += s[m];
        telescoped[m] -= s[m];
    }
    let cert = AppendixCertificate {
        ordering,
        ratio,
        decomposition_residual: max_abs_diff(&diff, &combo),
        telescoping_residual: max_abs_diff(&diff, &telescoped),
        s,
        a,
        t,
        t_sum,
        shift_residual,
        shift_support_residual,
    };
    let violations = cert.violations();
    if !violations.is_empty() {
        return Err(Error::VerificationFailed(violations.join("; ")));
    }
    Ok(cert)
}

/// Residuals of the mixing identities for `p^ε = (1-ε) p* + ε p` and
/// `d^ε = d - ε E_p[d]`, maximized over all partitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureCheck {
    pub epsilon: f64,
    pub p_eps: ProbabilityVector,
    pub d_eps: UtilityFunction,
    /// `max_Π ‖q^ε_Π - ((1-ε) q_Π + ε p)‖_∞`.
    pub posterior_residual: f64,
    /// `|E_{p^ε}[d^ε] - (1-ε) E_{p*}[d]|`.
    pub target_residual: f64,
    /// `max_Π |E_{q^ε_Π}[d^ε] - (1-ε) E_{q_Π}[d]|`.
    pub expectation_residual: f64,
    pub identities_hold: bool,
    /// When `d` is inaccessible under `p*`: whether `d^ε` is inaccessible
    /// under `p^ε`. `None` when the premise fails.
    pub reduction_holds: Option<bool>,
}

pub fn epsilon_mixture_check(
    p_star: &ProbabilityVector,
    p: &ProbabilityVector,
    d: &UtilityFunction,
    epsilon: f64,
    scan: &ScanOptions,
) -> Result<MixtureCheck> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange(format!("mixture weight {epsilon}")));
    }
    check_len(p.len(), p_star.len())?;
    check_len(p.len(), d.len())?;
    p.require_positive_prior()?;
    scan.check(p.len())?;

    let p_eps = p_star.mix(p, epsilon)?;
    let e_p = dot(d.values(), p.weights());
    let d_eps = d.shifted(epsilon * e_p);

    let target_residual =
        (dot(d_eps.values(), p_eps.weights()) - (1.0 - epsilon) * dot(d.values(), p_star.weights())).abs();
    let mut posterior_residual: f64 = 0.0;
    let mut expectation_residual: f64 = 0.0;
    for partition in enumerate_proper_nontrivial(p.len())? {
        let q = jeffrey_posterior(p_star, p, &partition)?;
        let q_eps = jeffrey_posterior(&p_eps, p, &partition)?;
        let mixed: Vec<f64> = q
            .weights()
            .iter()
            .zip(p.weights())
            .map(|(a, b)| (1.0 - epsilon) * a + epsilon * b)
            .collect();
        posterior_residual = posterior_residual.max(max_abs_diff(q_eps.weights(), &mixed));
        let lhs = dot(d_eps.values(), q_eps.weights());
        let rhs = (1.0 - epsilon) * dot(d.values(), q.weights());
        expectation_residual = expectation_residual.max((lhs - rhs).abs());
    }
    let scale = 1f64.max(d.max_abs());
    let identities_hold =
        posterior_residual <= TAU_NUM && target_residual <= TAU_NUM * scale && expectation_residual <= TAU_NUM * scale;

    let opts = VerifyOptions {
        scan: *scan,
        keep_partitions: false,
    };
    let premise = verify_inaccessibility(p_star, p, d, &opts)?.inaccessible;
    let reduction_holds = if premise {
        Some(verify_inaccessibility(&p_eps, p, &d_eps, &opts)?.inaccessible)
    } else {
        None
    };

    Ok(MixtureCheck {
        epsilon,
        p_eps,
        d_eps,
        posterior_residual,
        target_residual,
        expectation_residual,
        identities_hold,
        reduction_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct_inaccessible_decision, log_density_ratio, ConstructOptions, ZeroPolicy};
    use approx::assert_abs_diff_eq;

    fn pv(w: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(w.to_vec()).unwrap()
    }

    fn worked() -> (ProbabilityVector, ProbabilityVector) {
        (pv(&[0.5, 0.3, 0.2]), ProbabilityVector::uniform(3).unwrap())
    }

    #[test]
    fn monotonicity_examples() {
        let (ps, p) = worked();
        let scan = ScanOptions::default();
        let c = construct_inaccessible_decision(&ps, &p, 0.5, &ConstructOptions::default()).unwrap();
        let m = check_monotonicity(&ps, &p, &c.d, &scan).unwrap();
        assert!(m.hypotheses_hold && m.conclusion_holds);
        assert_abs_diff_eq!(m.e_p, -0.129064, epsilon = 1e-5);

        let m = check_monotonicity(&ps, &p, &UtilityFunction::constant(3, 1.0), &scan).unwrap();
        assert!(!m.hypotheses_hold);

        let g = log_density_ratio(&ps, &p, ZeroPolicy::Strict).unwrap();
        let m = check_monotonicity(&ps, &p, &g.shifted(0.03), &scan).unwrap();
        assert!(!m.hypotheses_hold);
        assert_abs_diff_eq!(m.max_posterior_expectation, 0.048686 - 0.03, epsilon = 1e-5);
    }

    #[test]
    fn worked_certificate() {
        let (ps, p) = worked();
        let cert = appendix_certificate(&ps, &p).unwrap();
        assert_eq!(cert.ordering, vec![0, 1, 2]);
        let expected_s = [1.0 / 6.0, 2.0 / 15.0];
        let expected_a = [0.1, 0.05];
        let expected_t = [5.0 / 3.0, 8.0 / 3.0];
        for m in 0..2 {
            assert_abs_diff_eq!(cert.s[m], expected_s[m], epsilon = 1e-12);
            assert_abs_diff_eq!(cert.a[m], expected_a[m], epsilon = 1e-12);
            assert_abs_diff_eq!(cert.t[m], expected_t[m], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(cert.t_sum, 13.0 / 3.0, epsilon = 1e-12);
        assert!(cert.decomposition_residual <= 1e-12);
        assert!(cert.shift_support_residual <= 1e-12);
    }

    #[test]
    fn certificate_rejections() {
        let p = ProbabilityVector::uniform(3).unwrap();
        assert_eq!(appendix_certificate(&p, &p), Err(Error::NotInjective));
        assert_eq!(
            appendix_certificate(&pv(&[0.5, 0.5, 0.0]), &p),
            Err(Error::PStarHasZero { outcome: 3 })
        );
    }

    #[test]
    fn certificate_in_unsorted_order() {
        let ps = pv(&[0.1, 0.25, 0.05, 0.4, 0.2]);
        let p = pv(&[0.3, 0.1, 0.2, 0.15, 0.25]);
        let cert = appendix_certificate(&ps, &p).unwrap();
        assert!(cert.ordering.windows(2).all(|w| cert.ratio[w[0]] < cert.ratio[w[1]]));
        // Closed form of A_m in the sorted order.
        for m in 0..4 {
            let (i, j) = (cert.ordering[m], cert.ordering[m + 1]);
            let (a, b, u, v) = (ps.weights()[i], ps.weights()[j], p.weights()[i], p.weights()[j]);
            assert_abs_diff_eq!(cert.a[m], (a * v - u * b) / (u + v), epsilon = 1e-15);
            assert!(cert.a[m] <= cert.s[m]);
        }
    }

    #[test]
    fn worked_mixture() {
        let (ps, p) = worked();
        let c = construct_inaccessible_decision(&ps, &p, 0.5, &ConstructOptions::default()).unwrap();
        let m = epsilon_mixture_check(&ps, &p, &c.d, 0.5, &ScanOptions::default()).unwrap();
        for (a, b) in m.p_eps.weights().iter().zip([5.0 / 12.0, 19.0 / 60.0, 4.0 / 15.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert!(m.identities_hold);
        assert_eq!(m.reduction_holds, Some(true));

        let m = epsilon_mixture_check(&ps, &p, &c.d, 0.999, &ScanOptions::default()).unwrap();
        assert!(m.identities_hold);
        assert!(max_abs_diff(m.p_eps.weights(), p.weights()) < 1e-3);

        assert!(matches!(
            epsilon_mixture_check(&ps, &p, &c.d, 1.0, &ScanOptions::default()),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn mixture_leaves_centered_decision_unchanged() {
        let (ps, p) = worked();
        let d = UtilityFunction::new(vec![1.0, -2.0, 1.0]).unwrap();
        let m = epsilon_mixture_check(&ps, &p, &d, 0.3, &ScanOptions::default()).unwrap();
        assert_eq!(m.d_eps, d);
    }
}
