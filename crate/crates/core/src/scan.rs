//! Exhaustive scans over every proper non-trivial partition.
//!
//! A scan folds a per-partition visitor into an accumulator. Single-threaded
//! scans walk one cursor over the whole stream. Parallel scans split the
//! stream by RGS prefix, fold each chunk independently on a rayon pool and
//! merge the chunk accumulators in prefix order, so merges see the same
//! sequence regardless of scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ProbabilityVector;
use crate::partitions::{check_outcome_count, chunk_prefixes, RgsCursor};
use crate::tolerance::DEFAULT_MAX_N;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanOptions {
    /// Scans over more outcomes than this are refused.
    pub max_n: usize,
    /// Worker threads; 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_N,
            threads: 1,
        }
    }
}

impl ScanOptions {
    pub fn parallel(threads: usize) -> Self {
        Self {
            threads: threads.max(1),
            ..Self::default()
        }
    }

    pub fn with_max_n(mut self, max_n: usize) -> Self {
        self.max_n = max_n;
        self
    }

    /// Parallel reductions agree with sequential ones within tolerance but
    /// are not promised to be bitwise identical.
    pub fn tolerance_deterministic(&self) -> bool {
        self.threads > 1
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        check_outcome_count(n)?;
        if n > self.max_n {
            return Err(Error::RefusedTooLarge { n, max: self.max_n });
        }
        Ok(())
    }
}

/// Folds `visit` over every proper non-trivial RGS of length `n`.
pub fn fold_partitions<A, I, V, M>(n: usize, opts: &ScanOptions, init: I, visit: V, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &[u8], usize) + Sync,
    M: Fn(A, A) -> A,
{
    opts.check(n)?;
    if opts.threads <= 1 {
        let mut acc = init();
        RgsCursor::new(n).for_each_proper(|labels, m| visit(&mut acc, labels, m));
        return Ok(acc);
    }

    let prefixes = chunk_prefixes(prefix_len(n, opts.threads));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::VerificationFailed(format!("thread pool: {e}")))?;
    let parts: Vec<A> = pool.install(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut acc = init();
                RgsCursor::with_prefix(n, prefix).for_each_proper(|labels, m| visit(&mut acc, labels, m));
                acc
            })
            .collect()
    });
    let mut parts = parts.into_iter();
    let first = parts.next().unwrap_or_else(&init);
    Ok(parts.fold(first, merge))
}

/// Shortest prefix length giving at least eight chunks per thread.
fn prefix_len(n: usize, threads: usize) -> usize {
    let target = 8 * threads;
    let mut k = 1;
    while k < n && crate::partitions::bell_number(k).map_or(u64::MAX, |b| b) < target as u64 {
        k += 1;
    }
    k.min(n)
}

/// Evaluates Jeffrey posteriors of a fixed prior/target pair one partition at
/// a time, with O(n) work and no allocation per partition.
#[derive(Debug, Clone)]
pub struct PosteriorKernel<'a> {
    p_star: &'a [f64],
    p: &'a [f64],
}

/// Per-block masses; reused across partitions.
#[derive(Debug, Clone)]
pub struct BlockScratch {
    target: Vec<f64>,
    prior: Vec<f64>,
    weighted: Vec<f64>,
}

impl BlockScratch {
    pub fn new(n: usize) -> Self {
        Self {
            target: vec![0.0; n],
            prior: vec![0.0; n],
            weighted: vec![0.0; n],
        }
    }
}

impl<'a> PosteriorKernel<'a> {
    /// Caller guarantees equal lengths and a strictly positive prior.
    pub fn new(p_star: &'a ProbabilityVector, p: &'a ProbabilityVector) -> Self {
        debug_assert_eq!(p_star.len(), p.len());
        Self {
            p_star: p_star.weights(),
            p: p.weights(),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `E_{q_Π}[f]` where `prior_times_f[i] = p(i) f(i)`.
    pub fn expectation(&self, labels: &[u8], blocks: usize, prior_times_f: &[f64], s: &mut BlockScratch) -> f64 {
        s.target[..blocks].fill(0.0);
        s.prior[..blocks].fill(0.0);
        s.weighted[..blocks].fill(0.0);
        for (i, &l) in labels.iter().enumerate() {
            let b = l as usize;
            s.target[b] += self.p_star[i];
            s.prior[b] += self.p[i];
            s.weighted[b] += prior_times_f[i];
        }
        (0..blocks).map(|b| s.target[b] / s.prior[b] * s.weighted[b]).sum()
    }

    /// Writes `q_Π` into `out`: `q(i) = p*(B) p(i) / p(B)` for `i ∈ B`.
    pub fn posterior_into(&self, labels: &[u8], blocks: usize, out: &mut [f64], s: &mut BlockScratch) {
        s.target[..blocks].fill(0.0);
        s.prior[..blocks].fill(0.0);
        for (i, &l) in labels.iter().enumerate() {
            s.target[l as usize] += self.p_star[i];
            s.prior[l as usize] += self.p[i];
        }
        for (i, &l) in labels.iter().enumerate() {
            let b = l as usize;
            out[i] = s.target[b] * self.p[i] / s.prior[b];
        }
    }

    pub fn prior_times(&self, f: &[f64]) -> Vec<f64> {
        self.p.iter().zip(f).map(|(a, b)| a * b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_counts_agree() {
        for n in 3..=8 {
            let count =
                |opts: ScanOptions| fold_partitions(n, &opts, || 0u64, |acc, _, _| *acc += 1, |a, b| a + b).unwrap();
            assert_eq!(count(ScanOptions::default()), count(ScanOptions::parallel(3)));
        }
    }

    #[test]
    fn parallel_merge_preserves_order() {
        let collect = |opts: ScanOptions| {
            fold_partitions(
                6,
                &opts,
                Vec::new,
                |acc: &mut Vec<Vec<u8>>, l, _| acc.push(l.to_vec()),
                |mut a, b| {
                    a.extend(b);
                    a
                },
            )
            .unwrap()
        };
        assert_eq!(collect(ScanOptions::default()), collect(ScanOptions::parallel(4)));
    }

    #[test]
    fn guard_refuses_large_n() {
        let opts = ScanOptions::default().with_max_n(6);
        let r = fold_partitions(7, &opts, || (), |_, _, _| (), |_, _| ());
        assert_eq!(r, Err(Error::RefusedTooLarge { n: 7, max: 6 }));
    }
}
