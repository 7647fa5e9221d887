//! Brute-force reference implementations.
//!
//! These enumerate the conditional null sample space directly (all label
//! arrangements with the observed group sizes) and share nothing with the
//! closed-form code beyond the jump count and the per-sample kernels.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::exact::{Alternative, TauDistribution};
use crate::resampling::Kernel;
use crate::rng::{make_stream, StreamKey};
use crate::stats::{auc, jump_count, rank_values, xi_binary, GroupCounts, LabeledSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_states: u128,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_states: 1_000_000,
        }
    }
}

fn count_subsets(n: usize, k: usize) -> u128 {
    // multiplicative formula, exact while the intermediate fits
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

fn check_budget(states: u128, budget: EnumerationBudget) -> Result<()> {
    if states > budget.max_states {
        return Err(Error::BudgetExceeded {
            states,
            budget: budget.max_states,
        });
    }
    Ok(())
}

/// All binary sequences with `n0` zeros and `n1` ones, each exactly once.
pub fn enumerate_binary_sequences(
    n0: usize,
    n1: usize,
    budget: EnumerationBudget,
) -> Result<impl Iterator<Item = Vec<u8>>> {
    let n = n0 + n1;
    check_budget(count_subsets(n, n1), budget)?;
    Ok((0..n).combinations(n1).map(move |ones| {
        let mut x = vec![0u8; n];
        for i in ones {
            x[i] = 1;
        }
        x
    }))
}

/// Histogram of jump counts over `B_{n0,n1}`.
pub fn brute_tau_pmf(n0: usize, n1: usize, budget: EnumerationBudget) -> Result<TauDistribution> {
    if n0 == 0 || n1 == 0 {
        return Err(Error::Domain("both groups must be nonempty".into()));
    }
    let mut hist = vec![0u64; n0 + n1];
    let mut total = 0u64;
    for x in enumerate_binary_sequences(n0, n1, budget)? {
        hist[jump_count(&x)] += 1;
        total += 1;
    }
    debug_assert_eq!(hist[0], 0);
    let last = hist.iter().rposition(|&c| c > 0).unwrap_or(0);
    let pmf = hist[1..=last]
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    Ok(TauDistribution::from_parts(n0, n1, pmf))
}

/// Average of the kernel over every `m`-subset, each subsample re-ranked from
/// scratch. Ties within a subsample are broken from a fixed stream.
pub fn brute_u_statistic(
    sample: &LabeledSample,
    m: usize,
    kernel: Kernel,
    budget: EnumerationBudget,
) -> Result<f64> {
    let n = sample.len();
    if m == 0 || m > n {
        return Err(Error::Domain(format!("m={m} must satisfy 1 <= m <= n={n}")));
    }
    check_budget(count_subsets(n, m), budget)?;
    let mut tie = make_stream(StreamKey::new(0, 0));
    let mut sum = 0.0;
    let mut count = 0usize;
    for subset in (0..n).combinations(m) {
        let sub = LabeledSample::new(
            subset.iter().map(|&i| sample.labels()[i]).collect(),
            subset.iter().map(|&i| sample.values()[i]).collect(),
        )?;
        let perm = rank_values(sub.values(), &mut tie)?;
        sum += match kernel {
            Kernel::Auc => match auc(&sub, &perm) {
                Ok(a) => a,
                Err(Error::DegenerateGroup { .. }) => 0.5,
                Err(e) => return Err(e),
            },
            Kernel::Xi => xi_binary(&sub, &perm)?,
        };
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Exact permutation p-value: the fraction of the `C(n, n0)` label
/// arrangements whose statistic is at least as extreme as the observed one.
pub fn brute_permutation_pvalue<F>(
    statistic: F,
    labels: &[u8],
    alternative: Alternative,
    center: f64,
    budget: EnumerationBudget,
) -> Result<f64>
where
    F: Fn(&[u8]) -> f64,
{
    let c = GroupCounts::from_labels(labels);
    let extremity = |v: f64| match alternative {
        Alternative::Greater => v,
        Alternative::Less => -v,
        Alternative::TwoSided => (v - center).abs(),
    };
    let observed = extremity(statistic(labels));
    let slack = 1e-12 * observed.abs().max(1.0);
    let mut hits = 0u64;
    let mut total = 0u64;
    for arrangement in enumerate_binary_sequences(c.n0, c.n1, budget)? {
        if extremity(statistic(&arrangement)) >= observed - slack {
            hits += 1;
        }
        total += 1;
    }
    Ok(hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_counts() {
        let b = EnumerationBudget::default();
        let mut s: Vec<Vec<u8>> = enumerate_binary_sequences(1, 1, b).unwrap().collect();
        s.sort();
        assert_eq!(s, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(enumerate_binary_sequences(1, 2, b).unwrap().count(), 3);
        let all: Vec<Vec<u8>> = enumerate_binary_sequences(3, 3, b).unwrap().collect();
        assert_eq!(all.len(), 20);
        assert_eq!(all.iter().unique().count(), 20);
        assert!(enumerate_binary_sequences(15, 15, b).is_err());
    }

    #[test]
    fn brute_tau_small() {
        let d = brute_tau_pmf(1, 2, EnumerationBudget::default()).unwrap();
        assert_eq!(d.pmf(), &[2.0 / 3.0, 1.0 / 3.0]);
        for n0 in 1..6 {
            for n1 in 1..6 {
                let d = brute_tau_pmf(n0, n1, EnumerationBudget::default()).unwrap();
                assert_eq!(d.max_tau(), 2 * n0.min(n1) - usize::from(n0 == n1));
            }
        }
    }

    #[test]
    fn brute_u_trivial_cases() {
        let s = LabeledSample::new(vec![0, 1, 1, 0, 1], vec![3.0, 1.0, 4.0, 1.5, 9.0]).unwrap();
        let b = EnumerationBudget::default();
        let perm = rank_values(s.values(), &mut make_stream(StreamKey::new(0, 0))).unwrap();
        assert_eq!(
            brute_u_statistic(&s, 5, Kernel::Auc, b).unwrap(),
            auc(&s, &perm).unwrap()
        );
        assert_eq!(
            brute_u_statistic(&s, 5, Kernel::Xi, b).unwrap(),
            xi_binary(&s, &perm).unwrap()
        );
        // m = 1: every subsample is degenerate
        assert_eq!(brute_u_statistic(&s, 1, Kernel::Auc, b).unwrap(), 0.5);
    }

    #[test]
    fn brute_pvalue_cases() {
        // values sorted ascending: labels (1,1,0,0,0) put group 0 on top
        let labels = [1u8, 1, 0, 0, 0];
        let auc_stat = |l: &[u8]| {
            let s = LabeledSample::new(l.to_vec(), vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
            let p = rank_values(s.values(), &mut make_stream(StreamKey::new(0, 0))).unwrap();
            auc(&s, &p).unwrap()
        };
        let b = EnumerationBudget::default();
        let p = brute_permutation_pvalue(auc_stat, &labels, Alternative::Greater, 0.5, b).unwrap();
        assert!((p - 0.1).abs() < 1e-15);
        let p = brute_permutation_pvalue(|_| 2.0, &labels, Alternative::TwoSided, 0.5, b).unwrap();
        assert_eq!(p, 1.0);
    }
}
