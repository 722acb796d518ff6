//! Proper non-trivial set partitions of `{1, ..., n}`.
//!
//! A partition is stored as its canonical restricted-growth string (RGS):
//! `rgs[i]` is the block label of outcome `i`, labels appear in first-use
//! order starting at 0. Lexicographic order on RGS is the enumeration order.
//!
//! Enumeration is streaming. [`RgsCursor`] walks RGS in place without
//! allocating; [`chunk_prefixes`] splits the space into disjoint sub-streams
//! (one per RGS prefix) whose concatenation in prefix order is the full
//! lexicographic stream.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::UtilityFunction;
use crate::tolerance::{MIN_OUTCOMES, TAU_NUM};

/// Largest outcome count whose labels fit the `u8` RGS representation.
pub const MAX_OUTCOMES: usize = 255;

/// A proper non-trivial partition: between 2 and `n - 1` blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    rgs: Vec<u8>,
    block_count: usize,
}

impl SetPartition {
    /// Builds a partition from a canonical RGS. Rejects non-canonical strings
    /// and partitions with 1 or `n` blocks.
    pub fn from_rgs(rgs: &[usize]) -> Result<Self> {
        let n = rgs.len();
        if n > MAX_OUTCOMES {
            return Err(Error::OutOfRange(format!("partition size {n}")));
        }
        if n < MIN_OUTCOMES {
            return Err(Error::TooSmall(n));
        }
        let mut next = 0usize;
        for (i, &label) in rgs.iter().enumerate() {
            if label > next {
                return Err(Error::Parse(format!(
                    "not a canonical restricted growth string: label {label} at position {} before label {next}",
                    i + 1
                )));
            }
            if label == next {
                next += 1;
            }
        }
        let block_count = next;
        if !(2..n).contains(&block_count) {
            return Err(Error::OutOfRange(format!(
                "partition with {block_count} blocks of {n} outcomes (must be proper non-trivial)"
            )));
        }
        Ok(Self {
            rgs: rgs.iter().map(|&l| l as u8).collect(),
            block_count,
        })
    }

    /// Builds a partition from 0-based blocks; the blocks must cover
    /// `0..n` exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::Parse(format!("outcome {} exceeds n = {n}", i + 1)));
                }
                if owner[i] != usize::MAX {
                    return Err(Error::Parse(format!("outcome {} appears twice", i + 1)));
                }
                owner[i] = b;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Parse(format!("outcome {} is not covered", i + 1)));
        }
        Self::from_rgs(&canonicalize(&owner))
    }

    /// Re-indexes a partition of positions `0..n` onto outcomes:
    /// position `k` becomes outcome `ordering[k]`.
    pub fn permuted(&self, ordering: &[usize]) -> Result<Self> {
        let n = self.len();
        if ordering.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ordering.len(),
            });
        }
        let blocks: Vec<Vec<usize>> = self
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|k| ordering[k]).collect())
            .collect();
        Self::from_blocks(n, &blocks)
    }

    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rgs.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    pub fn block_of(&self, outcome: usize) -> usize {
        self.rgs[outcome] as usize
    }

    /// Blocks as sorted lists of 0-based outcomes, in label order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (i, &label) in self.rgs.iter().enumerate() {
            blocks[label as usize].push(i);
        }
        blocks
    }

    /// Comma-separated RGS, e.g. `0,0,1`.
    pub fn rgs_string(&self) -> String {
        join(self.rgs.iter())
    }
}

impl fmt::Display for SetPartition {
    /// Block notation with 1-based outcomes, e.g. `{1,2}|{3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks().iter().enumerate() {
            if b > 0 {
                f.write_str("|")?;
            }
            write!(f, "{{{}}}", join(block.iter().map(|i| i + 1)))?;
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Accepts either an RGS (`0,0,1`) or block notation (`{1,2}|{3}`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let mut blocks = Vec::new();
            for part in s.split('|') {
                let inner = part
                    .trim()
                    .strip_prefix('{')
                    .and_then(|p| p.strip_suffix('}'))
                    .ok_or_else(|| Error::Parse(format!("malformed block {part:?}")))?;
                let block = inner
                    .split(',')
                    .map(|t| match t.trim().parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::Parse(format!("bad outcome label {t:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                blocks.push(block);
            }
            let n = blocks.iter().map(Vec::len).sum();
            Self::from_blocks(n, &blocks)
        } else {
            let rgs = s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad label {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Self::from_rgs(&rgs)
        }
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SetPartition", 2)?;
        st.serialize_field("rgs", &self.rgs_string())?;
        st.serialize_field("blocks", &self.to_string())?;
        st.end()
    }
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Relabels arbitrary block ids into first-use order.
fn canonicalize(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// In-place walker over all restricted-growth strings of a fixed length that
/// share a fixed prefix, in lexicographic order. Includes the coarsest and
/// finest partitions; callers filter by [`RgsCursor::block_count`].
#[derive(Debug, Clone)]
pub struct RgsCursor {
    labels: Vec<u8>,
    /// `prefix_max[i] = max(labels[..=i])`.
    prefix_max: Vec<u8>,
    /// Positions below this index never change.
    fixed: usize,
}

impl RgsCursor {
    /// Cursor over every RGS of length `n`, starting at `0,0,...,0`.
    pub fn new(n: usize) -> Self {
        Self::with_prefix(n, &[0])
    }

    /// Cursor over the RGS of length `n` that start with `prefix`, which must
    /// itself be a canonical RGS.
    pub fn with_prefix(n: usize, prefix: &[u8]) -> Self {
        assert!(n >= 1 && !prefix.is_empty() && prefix.len() <= n);
        let mut labels = vec![0u8; n];
        labels[..prefix.len()].copy_from_slice(prefix);
        let mut prefix_max = vec![0u8; n];
        let mut m = 0u8;
        for i in 0..n {
            m = m.max(labels[i]);
            prefix_max[i] = m;
        }
        Self {
            labels,
            prefix_max,
            fixed: prefix.len().max(1),
        }
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn block_count(&self) -> usize {
        self.prefix_max[self.labels.len() - 1] as usize + 1
    }

    /// Steps to the next RGS; returns `false` once the stream is exhausted.
    pub fn advance(&mut self) -> bool {
        let n = self.labels.len();
        let mut i = n;
        while i > self.fixed {
            i -= 1;
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                let m = self.prefix_max[i - 1].max(self.labels[i]);
                self.prefix_max[i] = m;
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = m;
                }
                return true;
            }
        }
        false
    }

    /// Calls `visit(labels, block_count)` for every proper non-trivial RGS
    /// remaining in this cursor, current position included.
    pub fn for_each_proper(mut self, mut visit: impl FnMut(&[u8], usize)) {
        let n = self.labels.len();
        loop {
            let m = self.block_count();
            if m >= 2 && m < n {
                visit(&self.labels, m);
            }
            if !self.advance() {
                break;
            }
        }
    }
}

/// Iterator over all proper non-trivial partitions of `n` outcomes in
/// lexicographic RGS order.
#[derive(Debug, Clone)]
pub struct ProperPartitions {
    cursor: RgsCursor,
    started: bool,
    done: bool,
}

impl Iterator for ProperPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let n = self.cursor.labels().len();
        loop {
            if self.started && !self.cursor.advance() {
                self.done = true;
                return None;
            }
            self.started = true;
            let m = self.cursor.block_count();
            if m >= 2 && m < n {
                return Some(SetPartition {
                    rgs: self.cursor.labels().to_vec(),
                    block_count: m,
                });
            }
        }
    }
}

pub fn enumerate_proper_nontrivial(n: usize) -> Result<ProperPartitions> {
    check_outcome_count(n)?;
    Ok(ProperPartitions {
        cursor: RgsCursor::new(n),
        started: false,
        done: false,
    })
}

pub(crate) fn check_outcome_count(n: usize) -> Result<()> {
    if n < MIN_OUTCOMES {
        Err(Error::TooSmall(n))
    } else if n > MAX_OUTCOMES {
        Err(Error::OutOfRange(format!("outcome count {n}")))
    } else {
        Ok(())
    }
}

/// All canonical RGS of length `k`, lexicographically. Each one seeds an
/// independent sub-stream via [`RgsCursor::with_prefix`].
pub fn chunk_prefixes(k: usize) -> Vec<Vec<u8>> {
    assert!(k >= 1);
    let mut out = Vec::new();
    let mut cursor = RgsCursor::new(k);
    loop {
        out.push(cursor.labels().to_vec());
        if !cursor.advance() {
            break;
        }
    }
    out
}

/// Bell numbers via the Bell triangle, `1 <= n <= 25`.
pub fn bell_number(n: usize) -> Result<u64> {
    if !(1..=25).contains(&n) {
        return Err(Error::OutOfRange(format!("Bell number index {n}")));
    }
    let mut row: Vec<u128> = vec![1];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let prev = *next.last().unwrap();
            next.push(prev + x);
        }
        row = next;
    }
    Ok(*row.last().unwrap() as u64)
}

/// Number of proper non-trivial partitions, `Bell(n) - 2`.
pub fn proper_partition_count(n: usize) -> Result<u64> {
    check_outcome_count(n)?;
    Ok(bell_number(n)? - 2)
}

/// `{{m, m+1}}` plus singletons, with 1-based `m` in `1..n`.
pub fn adjacent_pair_partition(m: usize, n: usize) -> Result<SetPartition> {
    check_outcome_count(n)?;
    if m < 1 || m >= n {
        return Err(Error::OutOfRange(format!("pair index {m} for n = {n}")));
    }
    let mut rgs = Vec::with_capacity(n);
    for i in 0..n {
        rgs.push(if i < m { i } else { i - 1 });
    }
    SetPartition::from_rgs(&rgs)
}

/// Why a level-set grouping is not a proper non-trivial partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotProper {
    /// Every value equal: one block.
    SingleBlock,
    /// Every value distinct: `n` blocks.
    AllSingletons,
}

/// Groups outcomes by equal values. Sorted values closer than `TAU_NUM` are
/// chained into one group.
pub fn level_set_partition(r: &UtilityFunction) -> Result<SetPartition, NotProper> {
    let labels = level_set_labels(r.values(), TAU_NUM);
    let n = labels.len();
    let m = labels.iter().max().map_or(0, |&x| x + 1);
    if m <= 1 {
        return Err(NotProper::SingleBlock);
    }
    if m >= n {
        return Err(NotProper::AllSingletons);
    }
    Ok(SetPartition::from_rgs(&labels).expect("level sets form a canonical proper partition"))
}

/// Canonical labels of the tolerance level sets of `values`.
pub(crate) fn level_set_labels(values: &[f64], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut group = vec![0usize; values.len()];
    let mut current = 0;
    for w in 1..order.len() {
        if values[order[w]] - values[order[w - 1]] > tol {
            current += 1;
        }
        group[order[w]] = current;
    }
    canonicalize(&group)
}
