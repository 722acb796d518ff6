//! Probability vectors, utility functions and decision contexts over a finite
//! outcome space `{1, ..., n}`.
//!
//! Outcomes are 0-based in memory. Anything that reaches a user (error
//! messages, serialized reports) uses 1-based labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{MIN_OUTCOMES, TAU_NORM};

/// Nonnegative weights over `n >= 3` outcomes that sum to one.
///
/// Inputs whose sum is within [`TAU_NORM`] of one are renormalized; anything
/// further off is rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector {
    weights: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < MIN_OUTCOMES {
            return Err(Error::TooSmall(weights.len()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NotAProbability(format!(
                    "weight {w} at outcome {} is negative or not finite",
                    i + 1
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TAU_NORM {
            return Err(Error::NotAProbability(format!("weights sum to {sum}, not 1")));
        }
        let weights = if sum == 1.0 {
            weights
        } else {
            weights.into_iter().map(|w| w / sum).collect()
        };
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n < MIN_OUTCOMES {
            return Err(Error::TooSmall(n));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    /// Wraps weights already known to be a distribution (e.g. a Jeffrey
    /// posterior computed from valid inputs); only renormalizes.
    pub(crate) fn from_distribution(weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        debug_assert!((sum - 1.0).abs() < 1e-6, "sum {sum}");
        let weights = if sum == 1.0 {
            weights
        } else {
            weights.into_iter().map(|w| w / sum).collect()
        };
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// First outcome (0-based) with zero mass.
    pub fn first_zero(&self) -> Option<usize> {
        self.weights.iter().position(|&w| w <= 0.0)
    }

    /// Total mass of a set of 0-based outcomes.
    pub fn mass(&self, outcomes: &[usize]) -> f64 {
        outcomes.iter().map(|&i| self.weights[i]).sum()
    }

    /// `(1 - eps) * self + eps * other`.
    pub fn mix(&self, other: &ProbabilityVector, eps: f64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Self::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| (1.0 - eps) * a + eps * b)
                .collect(),
        )
    }

    pub(crate) fn require_positive_prior(&self) -> Result<()> {
        match self.first_zero() {
            Some(i) => Err(Error::PriorHasZero { outcome: i + 1 }),
            None => Ok(()),
        }
    }
}

/// Real-valued function on outcomes (utilities, log ratios, decision gaps).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UtilityFunction {
    values: Vec<f64>,
}

impl UtilityFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteUtility { outcome: i + 1 });
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `self - c` pointwise.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v - c).collect(),
        }
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &UtilityFunction, scale: f64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + scale * b)
                .collect(),
        )
    }

    pub fn difference(&self, other: &UtilityFunction) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// `Σ_i f(i) q(i)`.
pub fn expectation(f: &UtilityFunction, q: &ProbabilityVector) -> Result<f64> {
    check_len(q.len(), f.len())?;
    Ok(dot(f.values(), q.weights()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Raw decision context as supplied by a caller or a JSON fixture.
///
/// Either `d` or both `f1` and `f2` must be present; `d` wins when both are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionContext {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub p_star: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
}

impl DecisionContext {
    pub fn from_utilities(p_star: Vec<f64>, p: Vec<f64>, f1: Vec<f64>, f2: Vec<f64>) -> Self {
        Self {
            n: None,
            p_star,
            p,
            f1: Some(f1),
            f2: Some(f2),
            d: None,
        }
    }

    pub fn from_difference(p_star: Vec<f64>, p: Vec<f64>, d: Vec<f64>) -> Self {
        Self {
            n: None,
            p_star,
            p,
            f1: None,
            f2: None,
            d: Some(d),
        }
    }
}

/// A non-trivial decision context with a strictly positive prior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedContext {
    pub p_star: ProbabilityVector,
    pub p: ProbabilityVector,
    pub d: UtilityFunction,
}

pub fn validate_context(ctx: &DecisionContext) -> Result<ValidatedContext> {
    let p_star = ProbabilityVector::new(ctx.p_star.clone())?;
    let p = ProbabilityVector::new(ctx.p.clone())?;
    let n = p_star.len();
    check_len(n, p.len())?;
    if let Some(declared) = ctx.n {
        check_len(declared, n)?;
    }
    p.require_positive_prior()?;

    let d = match (&ctx.d, &ctx.f1, &ctx.f2) {
        (Some(d), _, _) => UtilityFunction::new(d.clone())?,
        (None, Some(f1), Some(f2)) => {
            let f1 = UtilityFunction::new(f1.clone())?;
            let f2 = UtilityFunction::new(f2.clone())?;
            check_len(f1.len(), f2.len())?;
            f1.difference(&f2)?
        }
        _ => return Err(Error::Parse("decision context needs either d or both f1 and f2".into())),
    };
    check_len(n, d.len())?;
    if d.values().iter().all(|&x| x > 0.0) {
        return Err(Error::TrivialContext);
    }
    Ok(ValidatedContext { p_star, p, d })
}
