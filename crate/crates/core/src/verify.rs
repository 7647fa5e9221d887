//! Quick self-check: the closed forms and fast paths against the brute-force
//! oracles on small instances.

use crate::error::Result;
use crate::exact::{tau_pmf, Alternative};
use crate::mc::{
    permutation_test, LabelStatistic, PermutationScheme, PlainStatistic, ResampledStatistic,
};
use crate::multiplicity::{by_select, PValueVector};
use crate::resampling::{build_design, exhaustive_u_statistic, Kernel, PreparedDesign};
use crate::rng::{make_stream, Purpose, StreamKey};
use crate::stats::{rank_values, LabeledSample};
use crate::testkit::{
    brute_permutation_pvalue, brute_tau_pmf, brute_u_statistic, EnumerationBudget,
};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for OracleCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}\t{}\t{}", self.name, self.detail)
    }
}

type CheckFn = fn() -> Result<(bool, String)>;

fn key(a: u64) -> StreamKey {
    StreamKey::scoped(0x5eed, Purpose::Synthetic, a, 0)
}

fn tau_check() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 2..=12 {
        for n0 in 1..n {
            let a = tau_pmf(n0, n - n0)?;
            let b = brute_tau_pmf(n0, n - n0, EnumerationBudget::default())?;
            if a.pmf().len() != b.pmf().len() {
                return Ok((false, format!("support differs at ({n0},{})", n - n0)));
            }
            for (x, y) in a.pmf().iter().zip(b.pmf()) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max atom error {worst:.1e}")))
}

fn u_statistic_check() -> Result<(bool, String)> {
    let mut s = make_stream(key(1));
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = 2 + s.uniform_below(9);
        let m = 1 + s.uniform_below(n);
        let labels: Vec<u8> = (0..n).map(|_| s.uniform_below(2) as u8).collect();
        let values: Vec<f64> = (0..n).map(|_| s.uniform_f64()).collect();
        let sample = LabeledSample::new(labels, values)?;
        let perm = rank_values(sample.values(), &mut s)?;
        for kernel in [Kernel::Auc, Kernel::Xi] {
            let a = exhaustive_u_statistic(&sample, &perm, m, kernel)?;
            let b = brute_u_statistic(&sample, m, kernel, EnumerationBudget::default())?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok((
        worst <= 1e-12,
        format!("100 instances, max difference {worst:.1e}"),
    ))
}

fn permutation_check() -> Result<(bool, String)> {
    let mut s = make_stream(key(2));
    let mut cases = 0;
    for n in 2..=7 {
        let n1 = 1 + s.uniform_below(n - 1);
        let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < n1)).collect();
        s.shuffle(&mut labels);
        let values: Vec<f64> = (0..n).map(|_| s.uniform_f64()).collect();
        let perm = rank_values(&values, &mut s)?;
        let design = build_design(n, (n / 2).max(1), 5, key(100 + n as u64))?;
        let stats: [(Box<dyn LabelStatistic>, Alternative, f64); 3] = [
            (
                Box::new(PlainStatistic::new(&perm, Kernel::Auc)),
                Alternative::TwoSided,
                0.5,
            ),
            (
                Box::new(PlainStatistic::new(&perm, Kernel::Xi)),
                Alternative::Greater,
                0.0,
            ),
            (
                Box::new(ResampledStatistic::new(
                    PreparedDesign::new(&design, &perm)?,
                    Kernel::Xi,
                )),
                Alternative::Greater,
                0.0,
            ),
        ];
        for (stat, alt, center) in &stats {
            let scheme = PermutationScheme {
                n_perm: 1,
                key: key(3),
                alternative: *alt,
            };
            let fast = permutation_test(stat.as_ref(), &labels, &scheme, *center).pvalue;
            let brute = brute_permutation_pvalue(
                |l| stat.evaluate(l),
                &labels,
                *alt,
                *center,
                EnumerationBudget::default(),
            )?;
            if fast != brute {
                return Ok((false, format!("n={n}: {fast} vs {brute}")));
            }
            cases += 1;
        }
    }
    Ok((true, format!("{cases} cases identical")))
}

fn by_check() -> Result<(bool, String)> {
    let hand = by_select(&PValueVector::new(vec![0.01, 0.04, 0.5])?, 0.15)?;
    if hand.selected != [0, 1] {
        return Ok((false, format!("hand example selected {:?}", hand.selected)));
    }
    let mut s = make_stream(key(4));
    for _ in 0..1000 {
        let m = 1 + s.uniform_below(30);
        let p: Vec<f64> = (0..m).map(|_| 1e-6 + s.uniform_f64() * 0.2).collect();
        let c: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
        let mut sorted = p.clone();
        sorted.sort_by(f64::total_cmp);
        let k = (1..=m)
            .rev()
            .find(|&k| sorted[k - 1] <= k as f64 * 0.15 / (m as f64 * c))
            .unwrap_or(0);
        if by_select(&PValueVector::new(p)?, 0.15)?.selected.len() != k {
            return Ok((false, "step-up count differs from scan".into()));
        }
    }
    Ok((true, "hand example and 1000 scans agree".into()))
}

/// Runs every check; an error inside a check is reported as a failure.
pub fn run_oracle_suite() -> Vec<OracleCheck> {
    let checks: [(&'static str, CheckFn); 4] = [
        ("tau_pmf_vs_enumeration", tau_check),
        ("u_statistic_vs_enumeration", u_statistic_check),
        ("permutation_pvalue_vs_enumeration", permutation_check),
        ("by_select_vs_scan", by_check),
    ];
    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => OracleCheck {
                name,
                passed,
                detail,
            },
            Err(e) => OracleCheck {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
