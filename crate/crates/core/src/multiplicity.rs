//! Step-up FDR control: Benjamini–Yekutieli (arbitrary dependence) and
//! Benjamini–Hochberg.
//!
//! Threshold comparisons are inclusive with a relative slack of
//! [`THRESHOLD_TOL`] so that a p-value equal to its threshold in exact
//! arithmetic is selected even when the threshold is rounded down.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{Alternative, UNullDistribution};
use crate::rng::{Purpose, StreamKey};
use crate::stats::{rank_values, OrderedLabelSummary};
use crate::synthetic::{generate_synthetic, SyntheticSpec};

pub const THRESHOLD_TOL: f64 = 1e-12;

/// Inclusive `value <= bound` up to [`THRESHOLD_TOL`].
#[inline]
pub fn within(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + THRESHOLD_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FdrProcedure {
    By,
    Bh,
}

impl FdrProcedure {
    /// `c(p)`: the harmonic number for BY, 1 for BH.
    pub fn correction(self, p: usize) -> f64 {
        match self {
            FdrProcedure::By => (1..=p).map(|k| 1.0 / k as f64).sum(),
            FdrProcedure::Bh => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FdrProcedure::By => "by",
            FdrProcedure::Bh => "bh",
        }
    }
}

impl std::str::FromStr for FdrProcedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "by" => Ok(Self::By),
            "bh" => Ok(Self::Bh),
            other => Err(Error::Config(format!("unknown FDR procedure '{other}'"))),
        }
    }
}

/// Marginal p-values with their feature ids.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueVector {
    values: Vec<f64>,
    feature_ids: Vec<usize>,
}

impl PValueVector {
    /// Ids default to `0..len`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let ids = (0..values.len()).collect();
        Self::with_ids(values, ids)
    }

    pub fn with_ids(values: Vec<f64>, feature_ids: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("no p-values".into()));
        }
        if values.len() != feature_ids.len() {
            return Err(Error::LengthMismatch {
                labels: feature_ids.len(),
                values: values.len(),
            });
        }
        if let Some(p) = values.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::Domain(format!("p-value {p} outside (0, 1]")));
        }
        Ok(Self {
            values,
            feature_ids,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn feature_ids(&self) -> &[usize] {
        &self.feature_ids
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Positions sorted by `(p, feature id)`.
    fn sorted_positions(&self) -> Vec<usize> {
        let mut pos: Vec<usize> = (0..self.values.len()).collect();
        pos.sort_by(|&a, &b| {
            self.values[a]
                .total_cmp(&self.values[b])
                .then(self.feature_ids[a].cmp(&self.feature_ids[b]))
        });
        pos
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected feature ids, ascending.
    pub selected: Vec<usize>,
    pub alpha: f64,
    /// Adjusted p-values, aligned with the input order.
    pub adjusted: Vec<f64>,
    pub procedure: FdrProcedure,
    /// Number of rejections, `k*`.
    pub rejections: usize,
}

/// Step-up selection: `k* = max{i : p_(i) <= i α / (p c(p))}` and adjusted
/// p-values `min_{k >= i} min(1, p c(p) p_(k) / k)`.
pub fn step_up_select(
    pvalues: &PValueVector,
    alpha: f64,
    procedure: FdrProcedure,
) -> Result<SelectionResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} must lie in (0, 1)")));
    }
    let p = pvalues.len();
    let scale = p as f64 * procedure.correction(p);
    let order = pvalues.sorted_positions();

    let mut adjusted = vec![0.0; p];
    let mut running = 1.0f64;
    for (rank, &pos) in order.iter().enumerate().rev() {
        let adj = (pvalues.values[pos] * scale / (rank + 1) as f64).min(1.0);
        running = running.min(adj);
        adjusted[pos] = running;
    }

    let k_star = order
        .iter()
        .enumerate()
        .rev()
        .find(|(rank, &pos)| within(pvalues.values[pos], (rank + 1) as f64 * alpha / scale))
        .map_or(0, |(rank, _)| rank + 1);

    let mut selected: Vec<usize> = order[..k_star]
        .iter()
        .map(|&pos| pvalues.feature_ids[pos])
        .collect();
    selected.sort_unstable();
    Ok(SelectionResult {
        selected,
        alpha,
        adjusted,
        procedure,
        rejections: k_star,
    })
}

pub fn by_select(pvalues: &PValueVector, alpha: f64) -> Result<SelectionResult> {
    step_up_select(pvalues, alpha, FdrProcedure::By)
}

pub fn bh_select(pvalues: &PValueVector, alpha: f64) -> Result<SelectionResult> {
    step_up_select(pvalues, alpha, FdrProcedure::Bh)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrSimulationConfig {
    pub n: usize,
    pub p: usize,
    pub n_nonnull: usize,
    /// Mean shift of non-null features in standard deviations.
    pub effect: f64,
    /// Equicorrelation between features (0 for independent features).
    pub rho: f64,
    pub alpha: f64,
    pub procedure: FdrProcedure,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrEstimate {
    /// Mean of `V / max(R, 1)`.
    pub fdr: f64,
    pub std_error: f64,
    pub mean_rejections: f64,
    /// Fraction of replications with no rejection.
    pub zero_rejection_rate: f64,
}

/// Realized FDR of AUC screening (exact two-sided Mann–Whitney p-values)
/// followed by step-up selection, over `reps` synthetic datasets.
pub fn fdr_simulation(config: &FdrSimulationConfig) -> Result<FdrEstimate> {
    if config.reps == 0 {
        return Err(Error::Domain("reps must be positive".into()));
    }
    let n0 = config.n - config.n / 2;
    let n1 = config.n / 2;
    let null = UNullDistribution::new(n0, n1)?;
    let per_rep = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let spec = SyntheticSpec {
                n: config.n,
                p: config.p,
                n_nonnull: config.n_nonnull,
                shift: config.effect,
                rho: config.rho,
                key: StreamKey::scoped(config.seed, Purpose::Synthetic, rep as u64, 0),
            };
            let synth = generate_synthetic(&spec)?;
            let data = &synth.data;
            let mut ps = Vec::with_capacity(config.p);
            for (j, col) in data.columns().iter().enumerate() {
                let mut ties = crate::rng::make_stream(StreamKey::scoped(
                    config.seed,
                    Purpose::TieBreak,
                    j as u64,
                    rep as u64,
                ));
                let perm = rank_values(col, &mut ties)?;
                let s = OrderedLabelSummary::from_ordered(
                    perm.order().iter().map(|&i| data.labels()[i as usize]),
                );
                let u = s.u().ok_or(Error::DegenerateGroup { n0: s.n0, n1: s.n1 })?;
                ps.push(null.pvalue(u as f64, Alternative::TwoSided));
            }
            let sel = step_up_select(&PValueVector::new(ps)?, config.alpha, config.procedure)?;
            let v = sel.selected.iter().filter(|&&j| !synth.nonnull[j]).count();
            let r = sel.selected.len();
            Ok((v as f64 / r.max(1) as f64, r))
        })
        .collect::<Result<Vec<(f64, usize)>>>()?;
    let k = per_rep.len() as f64;
    let fdr = per_rep.iter().map(|x| x.0).sum::<f64>() / k;
    let var = if per_rep.len() > 1 {
        per_rep.iter().map(|x| (x.0 - fdr).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(FdrEstimate {
        fdr,
        std_error: (var / k).sqrt(),
        mean_rejections: per_rep.iter().map(|x| x.1 as f64).sum::<f64>() / k,
        zero_rejection_rate: per_rep.iter().filter(|x| x.1 == 0).count() as f64 / k,
    })
}
