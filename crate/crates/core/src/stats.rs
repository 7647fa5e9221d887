//! Rank statistics for a binary grouping: Mann–Whitney U, AUC and
//! Chatterjee's ξ specialised to binary labels.
//!
//! All statistics for one feature are computed from a single
//! [`RankPermutation`]. Exact ties in the values are broken uniformly at random
//! from a caller-supplied stream and logged.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Paired binary labels and real values for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    labels: Vec<u8>,
    values: Vec<f64>,
}

impl LabeledSample {
    pub fn new(labels: Vec<u8>, values: Vec<f64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                values: values.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::InvalidLabel { index, value });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { labels, values })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Same values with the label roles 0 and 1 exchanged.
    pub fn swapped_labels(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|l| 1 - l).collect(),
            values: self.values.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupCounts {
    pub n0: usize,
    pub n1: usize,
    pub n: usize,
}

impl GroupCounts {
    pub fn from_labels(labels: &[u8]) -> Self {
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        Self {
            n0: labels.len() - n1,
            n1,
            n: labels.len(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.n0 == 0 || self.n1 == 0
    }
}

pub fn group_counts(sample: &LabeledSample) -> GroupCounts {
    GroupCounts::from_labels(sample.labels())
}

/// A run of sorted positions `[start, start + len)` whose values were tied and
/// got randomly reordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TieBreak {
    pub start: usize,
    pub len: usize,
}

/// Sorting permutation of a value vector and its inverse.
///
/// `order[k]` is the index of the `k`-th smallest value (0-based) and
/// `ranks[i]` is the 1-based rank of value `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPermutation {
    order: Vec<u32>,
    ranks: Vec<u32>,
    tie_breaks: Vec<TieBreak>,
}

impl RankPermutation {
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn tie_break_log(&self) -> &[TieBreak] {
        &self.tie_breaks
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Labels read in ascending value order.
    pub fn labels_in_order(&self, labels: &[u8]) -> Vec<u8> {
        self.order.iter().map(|&i| labels[i as usize]).collect()
    }
}

/// Ranks `values` ascending, breaking exact ties uniformly at random.
///
/// The stream is consumed only when ties are present.
pub fn rank_values(values: &[f64], tie_stream: &mut RandomStream) -> Result<RankPermutation> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { index });
    }
    if values.len() > u32::MAX as usize {
        return Err(Error::Domain("too many values".into()));
    }
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    // Stable sort so the pre-shuffle state of a tie run is deterministic.
    order.sort_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .unwrap_or(Ordering::Equal)
    });

    let mut tie_breaks = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let v = values[order[start] as usize];
        let mut end = start + 1;
        while end < order.len() && values[order[end] as usize] == v {
            end += 1;
        }
        if end - start > 1 {
            tie_stream.shuffle(&mut order[start..end]);
            tie_breaks.push(TieBreak {
                start,
                len: end - start,
            });
        }
        start = end;
    }

    let mut ranks = vec![0u32; order.len()];
    for (k, &i) in order.iter().enumerate() {
        ranks[i as usize] = k as u32 + 1;
    }
    Ok(RankPermutation {
        order,
        ranks,
        tie_breaks,
    })
}

/// Summary of a label sequence read in ascending value order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrderedLabelSummary {
    pub n0: usize,
    pub n1: usize,
    /// Sum of 1-based positions of the zero labels.
    pub rank_sum0: u64,
    /// Number of adjacent unequal pairs.
    pub jumps: usize,
}

impl OrderedLabelSummary {
    /// Labels must be 0 or 1.
    pub fn from_ordered<I: IntoIterator<Item = u8>>(ordered: I) -> Self {
        let mut iter = ordered.into_iter();
        let Some(first) = iter.next() else {
            return Self::default();
        };
        // branch-free: this is the inner loop of every permutation test
        let mut prev = first;
        let (mut k, mut n1, mut rank_sum1, mut jumps) = (1u64, first as u64, first as u64, 0u64);
        for l in iter {
            k += 1;
            let b = l as u64;
            n1 += b;
            rank_sum1 += k * b;
            jumps += (l ^ prev) as u64;
            prev = l;
        }
        Self {
            n0: (k - n1) as usize,
            n1: n1 as usize,
            rank_sum0: k * (k + 1) / 2 - rank_sum1,
            jumps: jumps as usize,
        }
    }

    /// U = rank_sum0 − n0(n0+1)/2, or `None` for a degenerate grouping.
    pub fn u(&self) -> Option<u64> {
        if self.n0 == 0 || self.n1 == 0 {
            return None;
        }
        let n0 = self.n0 as u64;
        Some(self.rank_sum0 - n0 * (n0 + 1) / 2)
    }

    /// AUC, with 0.5 substituted for degenerate groupings.
    pub fn auc_or_half(&self) -> f64 {
        match self.u() {
            Some(u) => auc_from_u(u, self.n0, self.n1),
            None => 0.5,
        }
    }

    pub fn xi(&self) -> f64 {
        xi_from_jumps(self.jumps, self.n0, self.n1)
    }
}

/// `U / (n0 n1)`.
#[inline]
pub fn auc_from_u(u: u64, n0: usize, n1: usize) -> f64 {
    u as f64 / (n0 as f64 * n1 as f64)
}

/// `1 − n τ / (2 n0 n1)`, or 0 when either group is empty.
#[inline]
pub fn xi_from_jumps(jumps: usize, n0: usize, n1: usize) -> f64 {
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let n = (n0 + n1) as f64;
    1.0 - n * jumps as f64 / (2.0 * n0 as f64 * n1 as f64)
}

fn check_perm(sample: &LabeledSample, perm: &RankPermutation) -> Result<()> {
    if sample.len() != perm.len() {
        return Err(Error::LengthMismatch {
            labels: sample.len(),
            values: perm.len(),
        });
    }
    Ok(())
}

fn summarize(sample: &LabeledSample, perm: &RankPermutation) -> Result<OrderedLabelSummary> {
    check_perm(sample, perm)?;
    let labels = sample.labels();
    Ok(OrderedLabelSummary::from_ordered(
        perm.order().iter().map(|&i| labels[i as usize]),
    ))
}

/// Mann–Whitney U: the number of (group 0, group 1) pairs where the group-0
/// value ranks higher.
pub fn mann_whitney_u(sample: &LabeledSample, perm: &RankPermutation) -> Result<f64> {
    let s = summarize(sample, perm)?;
    s.u()
        .map(|u| u as f64)
        .ok_or(Error::DegenerateGroup { n0: s.n0, n1: s.n1 })
}

pub fn auc(sample: &LabeledSample, perm: &RankPermutation) -> Result<f64> {
    let s = summarize(sample, perm)?;
    s.u()
        .map(|u| auc_from_u(u, s.n0, s.n1))
        .ok_or(Error::DegenerateGroup { n0: s.n0, n1: s.n1 })
}

/// Number of positions `i` with `x[i] != x[i + 1]`.
pub fn jump_count(x: &[u8]) -> usize {
    x.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Chatterjee's ξ for a binary `X`; 0 when one group is empty.
pub fn xi_binary(sample: &LabeledSample, perm: &RankPermutation) -> Result<f64> {
    Ok(summarize(sample, perm)?.xi())
}
