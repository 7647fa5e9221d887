//! End-to-end runs: per-feature statistics and p-values, FDR selection,
//! fold stability curves and the ℓ sweep.
//!
//! Every random stream is keyed by `(seed, purpose, feature, fold slot)`,
//! where the fold slot is 0 for the full dataset and `i + 1` for fold `i`.
//! Features are processed in parallel but results are collected in column
//! order, so output does not depend on the number of worker threads.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::data::DatasetMatrix;
use crate::error::{Error, Result};
use crate::exact::{
    tau_pmf, xi_exact_pvalue_with, Alternative, TauDistribution, UNullDistribution,
};
use crate::mc::{
    permutation_pvalue, LabelStatistic, PermutationScheme, PlainStatistic, ResampledStatistic,
};
use crate::multiplicity::{step_up_select, within, FdrProcedure, PValueVector, SelectionResult};
use crate::resampling::{build_design, Kernel, PreparedDesign, SubsampleDesign};
use crate::rng::{make_stream, Purpose, StreamKey};
use crate::stability::{make_folds, FoldPartition, StabilityCurve};
use crate::stats::{rank_values, GroupCounts, OrderedLabelSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PValueMode {
    Exact,
    MonteCarlo,
}

impl FromStr for PValueMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "mc" | "montecarlo" => Ok(Self::MonteCarlo),
            other => Err(Error::Config(format!("unknown p-value mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kernel: Kernel,
    pub resample: bool,
    pub m: usize,
    pub ell: usize,
    pub n_perm: usize,
    pub alpha: f64,
    pub fdr: FdrProcedure,
    pub pvalue_mode: PValueMode,
    /// Defaults to two-sided for AUC and greater for ξ.
    pub alternative: Option<Alternative>,
    pub folds: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::Auc,
            resample: false,
            m: 50,
            ell: 100,
            n_perm: 100_000,
            alpha: 0.15,
            fdr: FdrProcedure::By,
            pvalue_mode: PValueMode::MonteCarlo,
            alternative: None,
            folds: 4,
            seed: 1,
            threads: 0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!(
            "{key}: expected a boolean, got '{other}'"
        ))),
    }
}

impl RunConfig {
    /// Sets one option by its command-line name (without the dashes).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "statistic" => self.kernel = value.trim().parse()?,
            "resample" => self.resample = parse_bool(key, value)?,
            "m" => self.m = parse_num(key, value)?,
            "ell" => self.ell = parse_num(key, value)?,
            "n-perm" | "n_perm" => self.n_perm = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "fdr" => self.fdr = value.trim().parse()?,
            "pvalue" => self.pvalue_mode = value.trim().parse()?,
            "alternative" => self.alternative = Some(value.trim().parse()?),
            "folds" => self.folds = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "threads" => self.threads = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown option '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are ignored.
    /// Keys outside this struct are returned for the caller to handle.
    pub fn apply_config_text(&mut self, text: &str) -> Result<Vec<(String, String)>> {
        let mut rest = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match self.set(k, v) {
                Err(Error::Config(msg)) if msg.starts_with("unknown option") => {
                    rest.push((k.to_string(), v.to_string()))
                }
                other => other?,
            }
        }
        Ok(rest)
    }

    pub fn alternative(&self) -> Alternative {
        self.alternative.unwrap_or(match self.kernel {
            Kernel::Auc => Alternative::TwoSided,
            Kernel::Xi => Alternative::Greater,
        })
    }

    /// Null center used for two-sided extremity.
    pub fn center(&self) -> f64 {
        match self.kernel {
            Kernel::Auc => 0.5,
            Kernel::Xi => 0.0,
        }
    }

    pub fn method_name(&self) -> String {
        if self.resample {
            format!("{}-resampled", self.kernel.name())
        } else {
            self.kernel.name().to_string()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha={} must lie in (0, 1)",
                self.alpha
            )));
        }
        if self.n_perm == 0 {
            return Err(Error::Config("n-perm must be positive".into()));
        }
        if self.resample {
            if self.m == 0 || self.ell == 0 {
                return Err(Error::Config("m and ell must be positive".into()));
            }
            if self.pvalue_mode == PValueMode::Exact {
                return Err(Error::Config(
                    "exact p-values are only available for plain statistics".into(),
                ));
            }
        }
        if self.pvalue_mode == PValueMode::Exact
            && self.kernel == Kernel::Xi
            && self.alternative() != Alternative::Greater
        {
            return Err(Error::Config(
                "exact xi p-values are one-sided (greater)".into(),
            ));
        }
        Ok(())
    }

    fn pool(&self) -> Result<Option<rayon::ThreadPool>> {
        if self.threads == 0 {
            return Ok(None);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map(Some)
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        Ok(match self.pool()? {
            Some(pool) => pool.install(f),
            None => f(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureReport {
    pub feature: String,
    pub statistic: f64,
    pub pvalue: f64,
    pub adjusted: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRun {
    pub reports: Vec<FeatureReport>,
    pub selection: SelectionResult,
}

impl SelectionRun {
    /// Tab-separated report, one row per feature in input column order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("feature\tstatistic\tp\tp_adjusted\tselected\n");
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.feature,
                r.statistic,
                r.pvalue,
                r.adjusted,
                u8::from(r.selected)
            );
        }
        out
    }
}

/// Null laws shared by all features of one dataset.
enum ExactNull {
    U(UNullDistribution),
    Tau(TauDistribution),
}

/// The statistic and p-value machinery for one dataset (full data or a fold).
struct Evaluator<'a> {
    labels: &'a [u8],
    config: &'a RunConfig,
    fold_slot: u64,
    design: Option<SubsampleDesign>,
    exact: Option<ExactNull>,
}

impl<'a> Evaluator<'a> {
    fn new(
        labels: &'a [u8],
        config: &'a RunConfig,
        fold_slot: u64,
        design: Option<SubsampleDesign>,
        with_pvalues: bool,
    ) -> Result<Self> {
        let counts = GroupCounts::from_labels(labels);
        if counts.is_degenerate() {
            return Err(Error::DegenerateGroup {
                n0: counts.n0,
                n1: counts.n1,
            });
        }
        let exact = if with_pvalues && config.pvalue_mode == PValueMode::Exact && !config.resample {
            Some(match config.kernel {
                Kernel::Auc => ExactNull::U(UNullDistribution::new(counts.n0, counts.n1)?),
                Kernel::Xi => ExactNull::Tau(tau_pmf(counts.n0, counts.n1)?),
            })
        } else {
            None
        };
        Ok(Self {
            labels,
            config,
            fold_slot,
            design,
            exact,
        })
    }

    fn statistic(&self, column: &[f64], j: usize) -> Result<Box<dyn LabelStatistic + Send>> {
        let mut ties = make_stream(StreamKey::scoped(
            self.config.seed,
            Purpose::TieBreak,
            j as u64,
            self.fold_slot,
        ));
        let perm = rank_values(column, &mut ties)?;
        Ok(match &self.design {
            Some(d) => Box::new(ResampledStatistic::new(
                PreparedDesign::new(d, &perm)?,
                self.config.kernel,
            )),
            None => Box::new(PlainStatistic::new(&perm, self.config.kernel)),
        })
    }

    fn score(&self, column: &[f64], j: usize) -> Result<f64> {
        Ok(self.statistic(column, j)?.evaluate(self.labels))
    }

    fn score_and_pvalue(&self, column: &[f64], j: usize) -> Result<(f64, f64)> {
        let stat = self.statistic(column, j)?;
        let observed = stat.evaluate(self.labels);
        let p = match &self.exact {
            Some(ExactNull::U(null)) => {
                let c = GroupCounts::from_labels(self.labels);
                let u = observed * (c.n0 * c.n1) as f64;
                null.pvalue(u.round(), self.config.alternative())
            }
            Some(ExactNull::Tau(dist)) => xi_exact_pvalue_with(dist, observed)?,
            None => {
                let scheme = PermutationScheme {
                    n_perm: self.config.n_perm,
                    key: StreamKey::scoped(
                        self.config.seed,
                        Purpose::Permutation,
                        j as u64,
                        self.fold_slot,
                    ),
                    alternative: self.config.alternative(),
                };
                permutation_pvalue(stat.as_ref(), self.labels, &scheme, self.config.center())
            }
        };
        Ok((observed, p))
    }
}

fn design_for(
    n: usize,
    config: &RunConfig,
    fold_slot: u64,
    ell: usize,
) -> Result<Option<SubsampleDesign>> {
    if !config.resample {
        return Ok(None);
    }
    if config.m > n {
        return Err(Error::Config(format!(
            "subsample size m={} exceeds the {n} available observations",
            config.m
        )));
    }
    build_design(
        n,
        config.m,
        ell,
        StreamKey::scoped(config.seed, Purpose::Design, 0, fold_slot),
    )
    .map(Some)
}

fn wrap_feature<T>(data: &DatasetMatrix, j: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Feature {
        feature: data.names()[j].clone(),
        source: Box::new(e),
    })
}

fn pvalues_for(data: &DatasetMatrix, eval: &Evaluator<'_>) -> Result<Vec<(f64, f64)>> {
    (0..data.p())
        .into_par_iter()
        .map(|j| wrap_feature(data, j, eval.score_and_pvalue(data.column(j), j)))
        .collect()
}

fn select_from(
    data: &DatasetMatrix,
    config: &RunConfig,
    stats: Vec<(f64, f64)>,
) -> Result<SelectionRun> {
    let pv = PValueVector::new(stats.iter().map(|s| s.1).collect())?;
    let selection = step_up_select(&pv, config.alpha, config.fdr)?;
    let reports = stats
        .into_iter()
        .enumerate()
        .map(|(j, (statistic, pvalue))| FeatureReport {
            feature: data.names()[j].clone(),
            statistic,
            pvalue,
            adjusted: selection.adjusted[j],
            selected: within(selection.adjusted[j], config.alpha),
        })
        .collect();
    Ok(SelectionRun { reports, selection })
}

/// Marginal statistic and p-value per feature (one shared subsample design),
/// then step-up FDR selection.
pub fn run_selection(data: &DatasetMatrix, config: &RunConfig) -> Result<SelectionRun> {
    config.validate()?;
    config.install(|| {
        let design = design_for(data.n(), config, 0, config.ell)?;
        let eval = Evaluator::new(data.labels(), config, 0, design, true)?;
        let stats = pvalues_for(data, &eval)?;
        select_from(data, config, stats)
    })?
}

/// Ranking score: `|AUC − 0.5|` for AUC, ξ itself for ξ.
fn ranking_score(kernel: Kernel, value: f64) -> f64 {
    match kernel {
        Kernel::Auc => (value - 0.5).abs(),
        Kernel::Xi => value,
    }
}

/// Per-fold feature scores on each fold's own observations, assembled into
/// `S(M_s)` over `s_grid`.
pub fn stability_curve(
    data: &DatasetMatrix,
    config: &RunConfig,
    folds: &FoldPartition,
    s_grid: &[usize],
) -> Result<StabilityCurve> {
    config.validate()?;
    config.install(|| {
        let mut fold_scores = Vec::with_capacity(folds.k());
        for i in 0..folds.k() {
            let slot = i as u64 + 1;
            let fold = data.select_rows(&folds.fold(i))?;
            let design = design_for(fold.n(), config, slot, config.ell)?;
            let eval = Evaluator::new(fold.labels(), config, slot, design, false)?;
            let scores = (0..fold.p())
                .into_par_iter()
                .map(|j| {
                    wrap_feature(&fold, j, eval.score(fold.column(j), j))
                        .map(|v| ranking_score(config.kernel, v))
                })
                .collect::<Result<Vec<f64>>>()?;
            fold_scores.push(scores);
        }
        StabilityCurve::from_scores(fold_scores, s_grid)
    })?
}

/// Folds keyed by the run seed, then [`stability_curve`]. An empty grid means
/// every `s` from 1 to `p`.
pub fn run_stability(
    data: &DatasetMatrix,
    config: &RunConfig,
    s_grid: &[usize],
) -> Result<StabilityCurve> {
    let folds = make_folds(
        data.n(),
        config.folds,
        StreamKey::scoped(config.seed, Purpose::Folds, 0, 0),
    )?;
    let grid: Vec<usize> = if s_grid.is_empty() {
        (1..=data.p()).collect()
    } else {
        s_grid.to_vec()
    };
    stability_curve(data, config, &folds, &grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllSweepRow {
    pub fold: usize,
    pub ell: usize,
    pub rejections: usize,
}

pub fn ell_sweep_tsv(rows: &[EllSweepRow]) -> String {
    let mut out = String::from("fold\tell\trejections\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{}\t{}", r.fold, r.ell, r.rejections);
    }
    out
}

/// Number of features selected by the resampled statistic for each ℓ in
/// `ell_grid` and each fold (the whole dataset when `config.folds < 2`).
///
/// Designs for different ℓ are prefixes of one design drawn at the largest ℓ,
/// and permutations are keyed per feature, so only ℓ changes between rows.
pub fn run_ell_sweep(
    data: &DatasetMatrix,
    config: &RunConfig,
    ell_grid: &[usize],
) -> Result<Vec<EllSweepRow>> {
    if ell_grid.is_empty() || ell_grid.contains(&0) {
        return Err(Error::Config(
            "ell grid must be nonempty and positive".into(),
        ));
    }
    let mut config = config.clone();
    config.resample = true;
    if config.pvalue_mode == PValueMode::Exact {
        config.pvalue_mode = PValueMode::MonteCarlo;
    }
    config.validate()?;
    let max_ell = *ell_grid.iter().max().expect("nonempty");
    let datasets: Vec<(usize, u64, DatasetMatrix)> = if config.folds >= 2 {
        let folds = make_folds(
            data.n(),
            config.folds,
            StreamKey::scoped(config.seed, Purpose::Folds, 0, 0),
        )?;
        (0..folds.k())
            .map(|i| Ok((i, i as u64 + 1, data.select_rows(&folds.fold(i))?)))
            .collect::<Result<_>>()?
    } else {
        vec![(0, 0, data.clone())]
    };
    let config = &config;
    config.install(|| {
        let mut rows = Vec::new();
        for (fold, slot, d) in &datasets {
            let full = design_for(d.n(), config, *slot, max_ell)?.expect("resampling enabled");
            for &ell in ell_grid {
                let design = full.truncated(ell)?;
                let eval = Evaluator::new(d.labels(), config, *slot, Some(design), true)?;
                let run = select_from(d, config, pvalues_for(d, &eval)?)?;
                rows.push(EllSweepRow {
                    fold: *fold,
                    ell,
                    rejections: run.selection.selected.len(),
                });
            }
        }
        Ok(rows)
    })?
}

/// Writes `report.tsv` into `dir`.
pub fn write_selection(dir: &Path, run: &SelectionRun) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.tsv"), run.to_tsv())?;
    Ok(())
}

/// Plain statistic of one labelled column, used by callers outside the
/// selection flow (e.g. to inspect a single feature).
pub fn plain_statistic(
    labels: &[u8],
    column: &[f64],
    kernel: Kernel,
    tie_key: StreamKey,
) -> Result<f64> {
    let perm = rank_values(column, &mut make_stream(tie_key))?;
    let s = OrderedLabelSummary::from_ordered(perm.order().iter().map(|&i| labels[i as usize]));
    Ok(kernel.apply(&s))
}
