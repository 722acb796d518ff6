//! Test-only helpers: random inputs and brute-force oracles that share no
//! code with the library's scan kernel.

#![allow(dead_code)]

use inacc_core::{radon_nikodym, ProbabilityVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the simplex with every weight at least `floor`.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = e.iter().sum();
        let w: Vec<f64> = e.into_iter().map(|x| x / s).collect();
        if w.iter().all(|&x| x >= floor) {
            return w;
        }
    }
}

/// Strictly positive pair with injective `p*/p`.
pub fn blind_spot_pair(rng: &mut ChaCha8Rng, n: usize) -> (ProbabilityVector, ProbabilityVector) {
    loop {
        let ps = ProbabilityVector::new(simplex(rng, n, 1e-6)).unwrap();
        let p = ProbabilityVector::new(simplex(rng, n, 1e-6)).unwrap();
        if radon_nikodym(&ps, &p).unwrap().injective {
            return (ps, p);
        }
    }
}

/// Pair whose ratio `p*/p` takes a random number of distinct levels, so that
/// some partitions do reproduce `p*`.
pub fn planted_pair(rng: &mut ChaCha8Rng, n: usize) -> (ProbabilityVector, ProbabilityVector) {
    let p = simplex(rng, n, 1e-3);
    let levels = rng.random_range(1..=n);
    let values: Vec<f64> = (0..levels).map(|_| rng.random_range(0.2..2.0)).collect();
    let raw: Vec<f64> = p.iter().map(|&w| w * values[rng.random_range(0..levels)]).collect();
    let s: f64 = raw.iter().sum();
    let ps = raw.into_iter().map(|x| x / s).collect();
    (ProbabilityVector::new(ps).unwrap(), ProbabilityVector::new(p).unwrap())
}

/// All set partitions of `0..n` as block lists, built by inserting each
/// element into an existing block or a new one.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut acc: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for x in 0..n {
        let mut next = Vec::new();
        for part in &acc {
            for b in 0..part.len() {
                let mut p = part.clone();
                p[b].push(x);
                next.push(p);
            }
            let mut p = part.clone();
            p.push(vec![x]);
            next.push(p);
        }
        acc = next;
    }
    acc
}

/// Proper non-trivial partitions only (2..n-1 blocks).
pub fn proper_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    all_partitions(n)
        .into_iter()
        .filter(|p| p.len() >= 2 && p.len() < n)
        .collect()
}

/// Jeffrey posterior straight from the definition.
pub fn posterior(ps: &[f64], p: &[f64], blocks: &[Vec<usize>]) -> Vec<f64> {
    let mut q = vec![0.0; p.len()];
    for b in blocks {
        let target: f64 = b.iter().map(|&i| ps[i]).sum();
        let prior: f64 = b.iter().map(|&i| p[i]).sum();
        for &i in b {
            q[i] = target * p[i] / prior;
        }
    }
    q
}

pub fn expect(f: &[f64], q: &[f64]) -> f64 {
    f.iter().zip(q).map(|(a, b)| a * b).sum()
}

/// `max_Π E_{q_Π}[f]` by brute force.
pub fn max_posterior_expectation(ps: &[f64], p: &[f64], f: &[f64]) -> f64 {
    proper_partitions(p.len())
        .iter()
        .map(|b| expect(f, &posterior(ps, p, b)))
        .fold(f64::NEG_INFINITY, f64::max)
}
