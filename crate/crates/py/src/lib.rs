//! Python bindings for `inacc_core`.
//!
//! Distributions and decisions can be passed as plain sequences of floats or
//! as `ProbabilityVector` objects; failures raise `inacc.InaccError`.

use std::collections::BTreeMap;

use inacc_core as core;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(inacc, InaccError, PyValueError);

fn err(e: core::Error) -> PyErr {
    InaccError::new_err(e.to_string())
}

fn weights(obj: &Bound<'_, PyAny>) -> PyResult<core::ProbabilityVector> {
    if let Ok(pv) = obj.extract::<PyRef<'_, ProbabilityVector>>() {
        return Ok(pv.inner.clone());
    }
    core::ProbabilityVector::new(obj.extract::<Vec<f64>>()?).map_err(err)
}

fn utility(values: Vec<f64>) -> PyResult<core::UtilityFunction> {
    core::UtilityFunction::new(values).map_err(err)
}

fn partition(obj: &Bound<'_, PyAny>) -> PyResult<core::SetPartition> {
    if let Ok(p) = obj.extract::<PyRef<'_, SetPartition>>() {
        return Ok(p.inner.clone());
    }
    if let Ok(text) = obj.extract::<String>() {
        return text.parse().map_err(err);
    }
    core::SetPartition::from_rgs(&obj.extract::<Vec<usize>>()?).map_err(err)
}

fn scan(parallel: usize) -> PyResult<core::ScanOptions> {
    if parallel == 0 {
        return Err(PyValueError::new_err("parallel must be at least 1"));
    }
    Ok(core::ScanOptions::parallel(parallel))
}

#[pyclass(module = "inacc", frozen)]
struct ProbabilityVector {
    inner: core::ProbabilityVector,
}

#[pymethods]
impl ProbabilityVector {
    #[new]
    fn new(weights: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::ProbabilityVector::new(weights).map_err(err)?,
        })
    }

    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: core::ProbabilityVector::uniform(n).map_err(err)?,
        })
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("ProbabilityVector({:?})", self.inner.weights())
    }
}

#[pyclass(module = "inacc", frozen)]
struct SetPartition {
    inner: core::SetPartition,
}

#[pymethods]
impl SetPartition {
    /// Accepts `"0,0,1"`, `"{1,2}|{3}"` or a list of block labels.
    #[new]
    fn new(value: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self {
            inner: partition(value)?,
        })
    }

    #[getter]
    fn rgs(&self) -> Vec<u8> {
        self.inner.rgs().to_vec()
    }

    /// Blocks as lists of 1-based outcomes.
    #[getter]
    fn blocks(&self) -> Vec<Vec<usize>> {
        self.inner
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|i| i + 1).collect())
            .collect()
    }

    #[getter]
    fn block_count(&self) -> usize {
        self.inner.block_count()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SetPartition('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.rgs().hash(&mut h);
        h.finish()
    }
}

fn wrap(p: &core::SetPartition) -> SetPartition {
    SetPartition { inner: p.clone() }
}

#[pyclass(module = "inacc", frozen)]
struct InaccessibilityReport {
    inner: core::InaccessibilityReport,
}

#[pymethods]
impl InaccessibilityReport {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }
    #[getter]
    fn partition_count(&self) -> u64 {
        self.inner.partition_count
    }
    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree
    }
    #[getter]
    fn strong(&self) -> bool {
        self.inner.strong
    }
    #[getter]
    fn inaccessible(&self) -> bool {
        self.inner.inaccessible
    }
    #[getter]
    fn max_posterior_expectation(&self) -> f64 {
        self.inner.max_posterior_expectation
    }
    #[getter]
    fn e_pstar(&self) -> f64 {
        self.inner.e_pstar
    }
    #[getter]
    fn e_p(&self) -> f64 {
        self.inner.e_p
    }
    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance
    }
    #[getter]
    fn tolerance_deterministic(&self) -> bool {
        self.inner.tolerance_deterministic
    }

    /// `(partition, expectation, inaccessible)` per partition; empty unless
    /// the scan was run with `detail=True`.
    #[getter]
    fn per_partition(&self) -> Vec<(SetPartition, f64, bool)> {
        self.inner
            .per_partition
            .iter()
            .map(|s| (wrap(&s.partition), s.expectation, s.inaccessible))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "InaccessibilityReport(n={}, degree={}/{}, strong={}, inaccessible={})",
            self.inner.n, self.inner.degree, self.inner.partition_count, self.inner.strong, self.inner.inaccessible
        )
    }
}

fn report(r: &core::InaccessibilityReport) -> InaccessibilityReport {
    InaccessibilityReport { inner: r.clone() }
}

#[pyclass(module = "inacc", frozen)]
struct Construction {
    inner: core::Construction,
}

#[pymethods]
impl Construction {
    #[getter]
    fn g(&self) -> Vec<f64> {
        self.inner.g.values().to_vec()
    }
    #[getter]
    fn d(&self) -> Vec<f64> {
        self.inner.d.values().to_vec()
    }
    #[getter]
    fn f1(&self) -> Vec<f64> {
        self.inner.f1.values().to_vec()
    }
    #[getter]
    fn f2(&self) -> Vec<f64> {
        self.inner.f2.values().to_vec()
    }
    /// Largest posterior expectation of the log ratio.
    #[getter(M)]
    fn m(&self) -> f64 {
        self.inner.m
    }
    #[getter]
    fn argmax(&self) -> SetPartition {
        wrap(&self.inner.argmax)
    }
    #[getter]
    fn e_pstar_g(&self) -> f64 {
        self.inner.e_pstar_g
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }
    #[getter]
    fn report(&self) -> InaccessibilityReport {
        report(&self.inner.report)
    }
}

#[pyclass(module = "inacc", frozen)]
struct DegreeSpectrum {
    inner: core::DegreeSpectrum,
}

#[pymethods]
impl DegreeSpectrum {
    #[getter]
    fn achievable(&self) -> Vec<u64> {
        self.inner.achievable.clone()
    }
    #[getter]
    fn cumulative(&self) -> Vec<u64> {
        self.inner.cumulative.clone()
    }
    /// `(posterior, multiplicity, score, representative)` in increasing score order.
    #[getter]
    fn classes(&self) -> Vec<(Vec<f64>, u64, f64, SetPartition)> {
        self.inner
            .classes
            .iter()
            .map(|c| (c.posterior.clone(), c.multiplicity, c.score, wrap(&c.representative)))
            .collect()
    }
    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn all_multiplicities_one(&self) -> bool {
        self.inner.all_multiplicities_one()
    }
    #[getter]
    fn partition_count(&self) -> u64 {
        self.inner.partition_count()
    }

    fn __repr__(&self) -> String {
        format!("DegreeSpectrum(achievable={:?})", self.inner.achievable)
    }
}

#[pyclass(module = "inacc", frozen)]
struct Realization {
    inner: core::Realization,
}

#[pymethods]
impl Realization {
    #[getter]
    fn k(&self) -> u64 {
        self.inner.k
    }
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }
    #[getter]
    fn d(&self) -> Vec<f64> {
        self.inner.d.values().to_vec()
    }
    #[getter]
    fn report(&self) -> InaccessibilityReport {
        report(&self.inner.report)
    }
}

#[pyclass(module = "inacc", frozen, get_all)]
struct MonotonicityCheck {
    hypotheses_hold: bool,
    conclusion_holds: bool,
    e_p: f64,
    e_pstar: f64,
    max_posterior_expectation: f64,
}

#[pyclass(module = "inacc", frozen, get_all)]
struct Certificate {
    /// 1-based outcomes sorted by increasing `p/p*`.
    ordering: Vec<usize>,
    ratio: Vec<f64>,
    s: Vec<f64>,
    a: Vec<f64>,
    t: Vec<f64>,
    t_sum: f64,
    decomposition_residual: f64,
    telescoping_residual: f64,
    shift_residual: f64,
    shift_support_residual: f64,
    violations: Vec<String>,
}

#[pyclass(module = "inacc", frozen, get_all)]
struct SweepSummary {
    n: usize,
    samples: u64,
    seed: u64,
    alpha: f64,
    blind_spot_count: u64,
    blind_spot_frequency: f64,
    constructed: u64,
    degenerate: u64,
    construction_failures: u64,
    certificate_failures: u64,
    theorem_violations: u64,
    degree_histogram: BTreeMap<u64, u64>,
    multiplicity_collisions: u64,
    prior_redraws: u64,
}

#[pyfunction]
fn bell_number(n: usize) -> PyResult<u64> {
    core::bell_number(n).map_err(err)
}

#[pyfunction]
fn proper_partition_count(n: usize) -> PyResult<u64> {
    core::proper_partition_count(n).map_err(err)
}

/// Every proper non-trivial partition of `{1..n}` in lexicographic order.
#[pyfunction]
#[pyo3(signature = (n, max_n = core::tolerance::DEFAULT_MAX_N))]
fn enumerate_partitions(n: usize, max_n: usize) -> PyResult<Vec<SetPartition>> {
    if n > max_n {
        return Err(err(core::Error::RefusedTooLarge { n, max: max_n }));
    }
    Ok(core::enumerate_proper_nontrivial(n)
        .map_err(err)?
        .map(|inner| SetPartition { inner })
        .collect())
}

#[pyfunction]
fn jeffrey_posterior(
    p_star: &Bound<'_, PyAny>,
    p: &Bound<'_, PyAny>,
    partition: &Bound<'_, PyAny>,
) -> PyResult<Vec<f64>> {
    let part = self::partition(partition)?;
    let q = core::jeffrey_posterior(&weights(p_star)?, &weights(p)?, &part).map_err(err)?;
    Ok(q.weights().to_vec())
}

/// `(p*/p, injective)`.
#[pyfunction]
fn radon_nikodym(p_star: &Bound<'_, PyAny>, p: &Bound<'_, PyAny>) -> PyResult<(Vec<f64>, bool)> {
    let r = core::radon_nikodym(&weights(p_star)?, &weights(p)?).map_err(err)?;
    Ok((r.values, r.injective))
}

/// `(member, witness)`; the witness is a partition reproducing `p*` when one exists.
#[pyfunction]
fn in_blind_spot(p_star: &Bound<'_, PyAny>, p: &Bound<'_, PyAny>) -> PyResult<(bool, Option<SetPartition>)> {
    let b = core::in_blind_spot(&weights(p_star)?, &weights(p)?).map_err(err)?;
    Ok((b.member, b.witness.map(|inner| SetPartition { inner })))
}

#[pyfunction]
fn kl_divergence(q1: &Bound<'_, PyAny>, q2: &Bound<'_, PyAny>) -> PyResult<f64> {
    core::kl_divergence(&weights(q1)?, &weights(q2)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p_star, p, eps_fraction = 0.5, clamp = false, parallel = 1))]
fn construct(
    p_star: &Bound<'_, PyAny>,
    p: &Bound<'_, PyAny>,
    eps_fraction: f64,
    clamp: bool,
    parallel: usize,
) -> PyResult<Construction> {
    let opts = core::ConstructOptions {
        policy: if clamp {
            core::ZeroPolicy::Clamp
        } else {
            core::ZeroPolicy::Strict
        },
        scan: scan(parallel)?,
    };
    let inner =
        core::construct_inaccessible_decision(&weights(p_star)?, &weights(p)?, eps_fraction, &opts).map_err(err)?;
    Ok(Construction { inner })
}

#[pyfunction]
#[pyo3(signature = (p_star, p, d, detail = false, parallel = 1))]
fn verify(
    p_star: &Bound<'_, PyAny>,
    p: &Bound<'_, PyAny>,
    d: Vec<f64>,
    detail: bool,
    parallel: usize,
) -> PyResult<InaccessibilityReport> {
    let opts = core::VerifyOptions {
        scan: scan(parallel)?,
        keep_partitions: detail,
    };
    let inner = core::verify_inaccessibility(&weights(p_star)?, &weights(p)?, &utility(d)?, &opts).map_err(err)?;
    Ok(InaccessibilityReport { inner })
}

#[pyfunction]
#[pyo3(signature = (p_star, p, d, parallel = 1))]
fn degree(p_star: &Bound<'_, PyAny>, p: &Bound<'_, PyAny>, d: Vec<f64>, parallel: usize) -> PyResult<u64> {
    core::degree(&weights(p_star)?, &weights(p)?, &utility(d)?, &scan(parallel)?).map_err(err)
}

fn spectrum_options(seed: u64, eta_fraction: f64, parallel: usize) -> PyResult<core::SpectrumOptions> {
    Ok(core::SpectrumOptions {
        seed,
        eta_fraction,
        scan: scan(parallel)?,
    })
}

#[pyfunction]
#[pyo3(signature = (p_star, p, seed = 0, eta_fraction = 0.5, parallel = 1))]
fn achievable_degrees(
    p_star: &Bound<'_, PyAny>,
    p: &Bound<'_, PyAny>,
    seed: u64,
    eta_fraction: f64,
    parallel: usize,
) -> PyResult<DegreeSpectrum> {
    let opts = spectrum_options(seed, eta_fraction, parallel)?;
    let inner = core::achievable_degrees(&weights(p_star)?, &weights(p)?, &opts).map_err(err)?;
    Ok(DegreeSpectrum { inner })
}

#[pyfunction]
#[pyo3(signature = (p_star, p, k, seed = 0, eta_fraction = 0.5, parallel = 1))]
fn realize_degree(
    p_star: &Bound<'_, PyAny>,
    p: &Bound<'_, PyAny>,
    k: u64,
    seed: u64,
    eta_fraction: f64,
    parallel: usize,
) -> PyResult<Realization> {
    let opts = spectrum_options(seed, eta_fraction, parallel)?;
    let (inner, _) = core::realize_degree(&weights(p_star)?, &weights(p)?, k, &opts).map_err(err)?;
    Ok(Realization { inner })
}

#[pyfunction]
#[pyo3(signature = (p_star, p, d, parallel = 1))]
fn check_monotonicity(
    p_star: &Bound<'_, PyAny>,
    p: &Bound<'_, PyAny>,
    d: Vec<f64>,
    parallel: usize,
) -> PyResult<MonotonicityCheck> {
    let m = core::check_monotonicity(&weights(p_star)?, &weights(p)?, &utility(d)?, &scan(parallel)?).map_err(err)?;
    Ok(MonotonicityCheck {
        hypotheses_hold: m.hypotheses_hold,
        conclusion_holds: m.conclusion_holds,
        e_p: m.e_p,
        e_pstar: m.e_pstar,
        max_posterior_expectation: m.max_posterior_expectation,
    })
}

#[pyfunction]
fn appendix_certificate(p_star: &Bound<'_, PyAny>, p: &Bound<'_, PyAny>) -> PyResult<Certificate> {
    let c = core::appendix_certificate(&weights(p_star)?, &weights(p)?).map_err(err)?;
    Ok(Certificate {
        ordering: c.ordering.iter().map(|i| i + 1).collect(),
        violations: c.violations(),
        ratio: c.ratio,
        s: c.s,
        a: c.a,
        t: c.t,
        t_sum: c.t_sum,
        decomposition_residual: c.decomposition_residual,
        telescoping_residual: c.telescoping_residual,
        shift_residual: c.shift_residual,
        shift_support_residual: c.shift_support_residual,
    })
}

#[pyfunction]
#[pyo3(signature = (n, samples, seed = 0, alpha = 1.0, eps_fraction = 0.5))]
fn sweep(py: Python<'_>, n: usize, samples: u64, seed: u64, alpha: f64, eps_fraction: f64) -> PyResult<SweepSummary> {
    let config = core::SweepConfig {
        alpha,
        eps_fraction,
        ..core::SweepConfig::new(n, samples, seed)
    };
    let s = py.detach(|| core::sweep(&config)).map_err(err)?;
    Ok(SweepSummary {
        n: s.n,
        samples: s.samples,
        seed: s.seed,
        alpha: s.alpha,
        blind_spot_count: s.blind_spot_count,
        blind_spot_frequency: s.blind_spot_frequency,
        constructed: s.constructed,
        degenerate: s.degenerate,
        construction_failures: s.construction_failures,
        certificate_failures: s.certificate_failures,
        theorem_violations: s.theorem_violations,
        degree_histogram: s.degree_histogram,
        multiplicity_collisions: s.multiplicity_collisions,
        prior_redraws: s.prior_redraws,
    })
}

#[pymodule]
fn inacc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InaccError", m.py().get_type::<InaccError>())?;
    m.add_class::<ProbabilityVector>()?;
    m.add_class::<SetPartition>()?;
    m.add_class::<InaccessibilityReport>()?;
    m.add_class::<Construction>()?;
    m.add_class::<DegreeSpectrum>()?;
    m.add_class::<Realization>()?;
    m.add_class::<MonotonicityCheck>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<SweepSummary>()?;
    m.add_function(wrap_pyfunction!(bell_number, m)?)?;
    m.add_function(wrap_pyfunction!(proper_partition_count, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(jeffrey_posterior, m)?)?;
    m.add_function(wrap_pyfunction!(radon_nikodym, m)?)?;
    m.add_function(wrap_pyfunction!(in_blind_spot, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(degree, m)?)?;
    m.add_function(wrap_pyfunction!(achievable_degrees, m)?)?;
    m.add_function(wrap_pyfunction!(realize_degree, m)?)?;
    m.add_function(wrap_pyfunction!(check_monotonicity, m)?)?;
    m.add_function(wrap_pyfunction!(appendix_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
