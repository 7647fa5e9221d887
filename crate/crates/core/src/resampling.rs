//! Subsampled U-statistics with AUC and ξ kernels.
//!
//! A [`SubsampleDesign`] holds `ℓ` index sets of size `m` drawn without
//! replacement. One design is built per run and shared by every feature, so
//! each feature is evaluated on exactly the same subsamples.
//!
//! Degenerate subsamples (one group empty) contribute 0.5 to the AUC average
//! and 0 to the ξ average.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::rng::{make_stream, uniform_subset_into, StreamKey};
use crate::stats::{LabeledSample, OrderedLabelSummary, RankPermutation};

/// Upper bound on `C(n, m)` for exhaustive evaluation.
pub const EXHAUSTIVE_MAX_SUBSETS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Auc,
    Xi,
}

impl Kernel {
    #[inline]
    pub fn apply(self, summary: &OrderedLabelSummary) -> f64 {
        match self {
            Kernel::Auc => summary.auc_or_half(),
            Kernel::Xi => summary.xi(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Auc => "auc",
            Kernel::Xi => "xi",
        }
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auc" => Ok(Kernel::Auc),
            "xi" => Ok(Kernel::Xi),
            other => Err(Error::Config(format!("unknown statistic '{other}'"))),
        }
    }
}

/// `ℓ` sorted index sets of size `m` over `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsampleDesign {
    n: usize,
    m: usize,
    ell: usize,
    key: StreamKey,
    indices: Vec<u32>,
}

impl SubsampleDesign {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    pub fn subsample(&self, j: usize) -> &[u32] {
        &self.indices[j * self.m..(j + 1) * self.m]
    }

    pub fn subsamples(&self) -> impl Iterator<Item = &[u32]> {
        self.indices.chunks_exact(self.m)
    }

    /// The first `ell` subsamples as a design of their own.
    pub fn truncated(&self, ell: usize) -> Result<Self> {
        if ell == 0 || ell > self.ell {
            return Err(Error::Domain(format!(
                "cannot truncate a design of {} subsamples to {ell}",
                self.ell
            )));
        }
        Ok(Self {
            indices: self.indices[..ell * self.m].to_vec(),
            ell,
            ..self.clone()
        })
    }
}

/// Draws `ell` independent uniform `m`-subsets of `[0, n)` from the stream of `key`.
///
/// Subsets are drawn sequentially, so a design with fewer subsamples under the
/// same key is a prefix of one with more.
pub fn build_design(n: usize, m: usize, ell: usize, key: StreamKey) -> Result<SubsampleDesign> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!(
            "subsample size m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    if ell == 0 {
        return Err(Error::Domain(
            "number of subsamples must be positive".into(),
        ));
    }
    let mut stream = make_stream(key);
    let mut indices = Vec::with_capacity(ell * m);
    let mut buf = Vec::with_capacity(m);
    for _ in 0..ell {
        uniform_subset_into(&mut stream, n, m, &mut buf)?;
        indices.extend_from_slice(&buf);
    }
    Ok(SubsampleDesign {
        n,
        m,
        ell,
        key,
        indices,
    })
}

/// A design specialised to one feature: every subsample's members listed in
/// ascending value order. Evaluating a label vector is then a linear scan,
/// which is what permutation tests repeat.
#[derive(Debug, Clone)]
pub struct PreparedDesign {
    m: usize,
    ell: usize,
    members: Vec<u32>,
}

impl PreparedDesign {
    pub fn new(design: &SubsampleDesign, perm: &RankPermutation) -> Result<Self> {
        if design.n != perm.len() {
            return Err(Error::LengthMismatch {
                labels: perm.len(),
                values: design.n,
            });
        }
        let ranks = perm.ranks();
        let mut members = Vec::with_capacity(design.indices.len());
        let mut block: Vec<u32> = Vec::with_capacity(design.m);
        for sub in design.subsamples() {
            block.clear();
            block.extend_from_slice(sub);
            block.sort_unstable_by_key(|&i| ranks[i as usize]);
            members.extend_from_slice(&block);
        }
        Ok(Self {
            m: design.m,
            ell: design.ell,
            members,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    #[inline]
    fn block_summary(labels: &[u8], block: &[u32]) -> OrderedLabelSummary {
        OrderedLabelSummary::from_ordered(block.iter().map(|&i| labels[i as usize]))
    }

    /// Mean kernel value over all subsamples for the given labels
    /// (indexed by original observation).
    pub fn evaluate(&self, labels: &[u8], kernel: Kernel) -> f64 {
        if self.m == labels.len() {
            // every block is the full sample; averaging copies could round
            return kernel.apply(&Self::block_summary(labels, &self.members[..self.m]));
        }
        let mut sum = 0.0;
        for block in self.members.chunks_exact(self.m) {
            sum += kernel.apply(&Self::block_summary(labels, block));
        }
        sum / self.ell as f64
    }

    /// Kernel value per subsample.
    pub fn kernel_values(&self, labels: &[u8], kernel: Kernel) -> Vec<f64> {
        self.members
            .chunks_exact(self.m)
            .map(|block| kernel.apply(&Self::block_summary(labels, block)))
            .collect()
    }
}

/// Mean of the per-subsample kernel values and its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampledSummary {
    pub mean: f64,
    pub std_error: f64,
}

fn check_lengths(sample: &LabeledSample, perm: &RankPermutation) -> Result<()> {
    if sample.len() != perm.len() {
        return Err(Error::LengthMismatch {
            labels: sample.len(),
            values: perm.len(),
        });
    }
    Ok(())
}

pub fn resampled_statistic(
    sample: &LabeledSample,
    perm: &RankPermutation,
    design: &SubsampleDesign,
    kernel: Kernel,
) -> Result<f64> {
    check_lengths(sample, perm)?;
    Ok(PreparedDesign::new(design, perm)?.evaluate(sample.labels(), kernel))
}

/// Subsampled AUC average.
pub fn resampled_auc(
    sample: &LabeledSample,
    perm: &RankPermutation,
    design: &SubsampleDesign,
) -> Result<f64> {
    resampled_statistic(sample, perm, design, Kernel::Auc)
}

/// Subsampled ξ average.
pub fn resampled_xi(
    sample: &LabeledSample,
    perm: &RankPermutation,
    design: &SubsampleDesign,
) -> Result<f64> {
    resampled_statistic(sample, perm, design, Kernel::Xi)
}

pub fn resampled_summary(
    sample: &LabeledSample,
    perm: &RankPermutation,
    design: &SubsampleDesign,
    kernel: Kernel,
) -> Result<ResampledSummary> {
    check_lengths(sample, perm)?;
    let values = PreparedDesign::new(design, perm)?.kernel_values(sample.labels(), kernel);
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(ResampledSummary {
        mean,
        std_error: (var / k).sqrt(),
    })
}

/// Average of the kernel over all `C(n, m)` subsets, in lexicographic order.
pub fn exhaustive_u_statistic(
    sample: &LabeledSample,
    perm: &RankPermutation,
    m: usize,
    kernel: Kernel,
) -> Result<f64> {
    check_lengths(sample, perm)?;
    let n = sample.len();
    if m == 0 || m > n {
        return Err(Error::Domain(format!(
            "subsample size m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    let count = binomial(n as u64, m as u64);
    if count > EXHAUSTIVE_MAX_SUBSETS {
        return Err(Error::BudgetExceeded {
            states: count as u128,
            budget: EXHAUSTIVE_MAX_SUBSETS as u128,
        });
    }
    let ranks = perm.ranks();
    let labels = sample.labels();
    let mut sum = 0.0;
    let mut visited = 0usize;
    let mut block: Vec<u32> = Vec::with_capacity(m);
    for subset in (0..n as u32).combinations(m) {
        block.clear();
        block.extend_from_slice(&subset);
        block.sort_unstable_by_key(|&i| ranks[i as usize]);
        sum += kernel.apply(&PreparedDesign::block_summary(labels, &block));
        visited += 1;
    }
    Ok(sum / visited as f64)
}

/// Mean ξ over `ell` ordinary bootstrap resamples (with replacement, size n).
///
/// Copies of the same observation share a value and a label, so they sit
/// next to each other in value order and never add a jump.
pub fn bootstrap_xi_with_replacement(
    sample: &LabeledSample,
    perm: &RankPermutation,
    ell: usize,
    key: StreamKey,
) -> Result<f64> {
    check_lengths(sample, perm)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::Domain("bootstrap needs n >= 2".into()));
    }
    if ell == 0 {
        return Err(Error::Domain("number of resamples must be positive".into()));
    }
    let order = perm.order();
    let labels = sample.labels();
    let mut stream = make_stream(key);
    let mut multiplicity = vec![0u32; n];
    let mut sum = 0.0;
    for _ in 0..ell {
        multiplicity.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            multiplicity[stream.uniform_below(n)] += 1;
        }
        // walk ranks ascending; multiplicity is indexed by observation
        let seq = order.iter().flat_map(|&i| {
            let l = labels[i as usize];
            std::iter::repeat_n(l, multiplicity[i as usize] as usize)
        });
        sum += OrderedLabelSummary::from_ordered(seq).xi();
    }
    Ok(sum / ell as f64)
}
