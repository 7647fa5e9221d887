//! Permutation p-values with the `(b + 1)/(n_perm + 1)` estimator.
//!
//! A statistic is anything implementing [`LabelStatistic`]: the values are
//! bound at construction and only the label vector varies. Random
//! permutations are drawn in fixed-size batches, each with its own stream
//! derived from the scheme key, so the count of exceedances does not depend on
//! how batches are scheduled. When `n! <= 5040` all permutations are
//! enumerated and the exact fraction `b / n!` is returned.

use rayon::prelude::*;

use crate::error::Result;
use crate::exact::Alternative;
use crate::resampling::{Kernel, PreparedDesign};
use crate::rng::{make_stream, StreamKey};
use crate::stats::{LabeledSample, OrderedLabelSummary, RankPermutation};

/// Largest `n!` enumerated exhaustively.
pub const EXHAUSTIVE_MAX_PERMUTATIONS: u64 = 5040;

/// Permutations per independently seeded batch.
pub const BATCH_SIZE: usize = 512;

/// Relative slack when comparing a permuted statistic against the observed one.
pub const EXTREMITY_TOL: f64 = 1e-12;

/// A statistic of a label vector, with the values already bound.
pub trait LabelStatistic: Sync {
    fn evaluate(&self, labels: &[u8]) -> f64;
}

impl<F> LabelStatistic for F
where
    F: Fn(&[u8]) -> f64 + Sync,
{
    fn evaluate(&self, labels: &[u8]) -> f64 {
        self(labels)
    }
}

/// AUC (0.5 if degenerate) or ξ of the full sample.
#[derive(Debug, Clone)]
pub struct PlainStatistic {
    order: Vec<u32>,
    kernel: Kernel,
}

impl PlainStatistic {
    pub fn new(perm: &RankPermutation, kernel: Kernel) -> Self {
        Self {
            order: perm.order().to_vec(),
            kernel,
        }
    }
}

impl LabelStatistic for PlainStatistic {
    fn evaluate(&self, labels: &[u8]) -> f64 {
        let summary =
            OrderedLabelSummary::from_ordered(self.order.iter().map(|&i| labels[i as usize]));
        self.kernel.apply(&summary)
    }
}

/// Subsampled AUC or ξ over a fixed design.
#[derive(Debug, Clone)]
pub struct ResampledStatistic {
    prepared: PreparedDesign,
    kernel: Kernel,
}

impl ResampledStatistic {
    pub fn new(prepared: PreparedDesign, kernel: Kernel) -> Self {
        Self { prepared, kernel }
    }
}

impl LabelStatistic for ResampledStatistic {
    fn evaluate(&self, labels: &[u8]) -> f64 {
        self.prepared.evaluate(labels, self.kernel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationScheme {
    pub n_perm: usize,
    pub key: StreamKey,
    pub alternative: Alternative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationOutcome {
    pub pvalue: f64,
    pub observed: f64,
    /// Permuted statistics at least as extreme as the observed one.
    pub exceedances: u64,
    pub permutations: u64,
    pub exhaustive: bool,
}

/// Signed distance used to order statistics by extremity.
#[inline]
pub fn extremity(alternative: Alternative, center: f64, value: f64) -> f64 {
    match alternative {
        Alternative::Greater => value,
        Alternative::Less => -value,
        Alternative::TwoSided => (value - center).abs(),
    }
}

/// Inclusive comparison `candidate >= observed` with [`EXTREMITY_TOL`] slack.
#[inline]
pub fn at_least_as_extreme(candidate: f64, observed: f64) -> bool {
    candidate >= observed - EXTREMITY_TOL * observed.abs().max(1.0)
}

fn factorial_capped(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| {
        acc.checked_mul(k)
            .filter(|&v| v <= EXHAUSTIVE_MAX_PERMUTATIONS)
    })
}

pub fn permutation_pvalue<S: LabelStatistic + ?Sized>(
    statistic: &S,
    labels: &[u8],
    scheme: &PermutationScheme,
    center: f64,
) -> f64 {
    permutation_test(statistic, labels, scheme, center).pvalue
}

pub fn permutation_test<S: LabelStatistic + ?Sized>(
    statistic: &S,
    labels: &[u8],
    scheme: &PermutationScheme,
    center: f64,
) -> PermutationOutcome {
    let observed = statistic.evaluate(labels);
    let threshold = extremity(scheme.alternative, center, observed);
    let hit = |v: f64| at_least_as_extreme(extremity(scheme.alternative, center, v), threshold);

    if let Some(total) = factorial_capped(labels.len()) {
        let b = enumerate_permutations(labels, |perm| hit(statistic.evaluate(perm)));
        return PermutationOutcome {
            pvalue: b as f64 / total as f64,
            observed,
            exceedances: b,
            permutations: total,
            exhaustive: true,
        };
    }

    let n_perm = scheme.n_perm.max(1);
    let batches = n_perm.div_ceil(BATCH_SIZE);
    let b: u64 = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let count = BATCH_SIZE.min(n_perm - batch * BATCH_SIZE);
            let mut stream = make_stream(scheme.key.child(batch as u64));
            let mut perm = labels.to_vec();
            let mut hits = 0u64;
            for _ in 0..count {
                stream.shuffle(&mut perm);
                if hit(statistic.evaluate(&perm)) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    PermutationOutcome {
        pvalue: (b + 1) as f64 / (n_perm + 1) as f64,
        observed,
        exceedances: b,
        permutations: n_perm as u64,
        exhaustive: false,
    }
}

/// Visits all `n!` orderings of `labels` (Heap's algorithm, identity first)
/// and counts those for which `pred` holds.
fn enumerate_permutations<F: FnMut(&[u8]) -> bool>(labels: &[u8], mut pred: F) -> u64 {
    let mut a = labels.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    let mut count = u64::from(pred(&a));
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            count += u64::from(pred(&a));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count
}

/// Empirical distribution of p-values over simulated null datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformitySummary {
    /// Sorted ascending.
    pub pvalues: Vec<f64>,
    /// `sup_t |F̂(t) − t|`.
    pub max_deviation: f64,
}

impl UniformitySummary {
    pub fn from_pvalues(mut pvalues: Vec<f64>) -> Self {
        pvalues.sort_by(|a, b| a.total_cmp(b));
        let k = pvalues.len() as f64;
        let max_deviation = pvalues
            .iter()
            .enumerate()
            .map(|(i, &p)| ((i + 1) as f64 / k - p).max(p - i as f64 / k))
            .fold(0.0, f64::max);
        Self {
            pvalues,
            max_deviation,
        }
    }

    /// Fraction of p-values `<= alpha`.
    pub fn rejection_rate(&self, alpha: f64) -> f64 {
        let k = self.pvalues.partition_point(|&p| p <= alpha);
        k as f64 / self.pvalues.len() as f64
    }

    /// `alpha + z * sqrt(alpha (1 − alpha) / N)`.
    pub fn rejection_bound(&self, alpha: f64, z: f64) -> f64 {
        alpha + z * (alpha * (1.0 - alpha) / self.pvalues.len() as f64).sqrt()
    }
}

/// Runs `pvalue` on `n_datasets` null datasets from `null_generator` (both
/// receive the dataset index) in parallel and summarises the p-values.
pub fn pvalue_uniformity_diagnostic<G, P>(
    null_generator: G,
    pvalue: P,
    n_datasets: usize,
) -> Result<UniformitySummary>
where
    G: Fn(usize) -> Result<LabeledSample> + Sync,
    P: Fn(usize, &LabeledSample) -> Result<f64> + Sync,
{
    let ps = (0..n_datasets)
        .into_par_iter()
        .map(|i| {
            let sample = null_generator(i)?;
            pvalue(i, &sample)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(UniformitySummary::from_pvalues(ps))
}
