//! Acceptance suite. Each criterion prints one `[PASS]` or `[FAIL]` line;
//! the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use stabsel::exact::{
    tau_mean, tau_pmf, tau_variance_equal, xi_exact_pvalue_with, Alternative, UNullDistribution,
};
use stabsel::mc::{
    permutation_test, pvalue_uniformity_diagnostic, PermutationScheme, PlainStatistic,
    ResampledStatistic,
};
use stabsel::multiplicity::{
    by_select, fdr_simulation, FdrProcedure, FdrSimulationConfig, PValueVector,
};
use stabsel::pipeline::{
    run_ell_sweep, run_selection, run_stability, write_selection, PValueMode, RunConfig,
};
use stabsel::resampling::{
    bootstrap_xi_with_replacement, build_design, exhaustive_u_statistic, resampled_summary,
    resampled_xi, Kernel, PreparedDesign,
};
use stabsel::rng::{make_stream, Purpose, RandomStream, StreamKey};
use stabsel::stability::{random_intersection_baseline, stability_count, top_s, StabilityCurve};
use stabsel::stats::{rank_values, LabeledSample, OrderedLabelSummary};
use stabsel::synthetic::{generate_synthetic, SyntheticSpec};
use stabsel::testkit::{brute_permutation_pvalue, brute_tau_pmf, EnumerationBudget};

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn key(seed: u64, a: u64) -> StreamKey {
    StreamKey::scoped(seed, Purpose::Synthetic, a, 0xacce)
}

fn balanced_labels(n: usize, stream: &mut RandomStream) -> Vec<u8> {
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i >= n - n / 2)).collect();
    stream.shuffle(&mut labels);
    labels
}

/// Independent labels and continuous values.
fn null_sample(n: usize, stream: &mut RandomStream) -> LabeledSample {
    let labels = balanced_labels(n, stream);
    let values = (0..n).map(|_| stream.uniform_f64()).collect();
    LabeledSample::new(labels, values).expect("valid sample")
}

fn c1_tau_exactness() -> Check {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for n in 2..=12 {
        for n0 in 1..n {
            let n1 = n - n0;
            let closed = tau_pmf(n0, n1).map_err(|e| e.to_string())?;
            let brute =
                brute_tau_pmf(n0, n1, EnumerationBudget::default()).map_err(|e| e.to_string())?;
            ensure(closed.pmf().len() == brute.pmf().len(), || {
                format!("support mismatch at ({n0},{n1})")
            })?;
            for (a, b) in closed.pmf().iter().zip(brute.pmf()) {
                worst = worst.max((a - b).abs());
            }
            cases += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("max atom error {worst:e}"))?;
    Ok(format!("{cases} (n0,n1) pairs, max atom error {worst:.1e}"))
}

fn c2_lemma_moments() -> Check {
    let (mut mean_err, mut xi_err): (f64, f64) = (0.0, 0.0);
    for n0 in 1..=50 {
        for n1 in 1..=50 {
            let d = tau_pmf(n0, n1).map_err(|e| e.to_string())?;
            let n = (n0 + n1) as f64;
            let expected = 2.0 * n0 as f64 * n1 as f64 / n;
            mean_err = mean_err.max((d.mean() - expected).abs());
            ensure((tau_mean(n0, n1) - expected).abs() <= 1e-10, || {
                "tau_mean formula".into()
            })?;
            xi_err = xi_err.max(d.xi_mean().abs());
        }
    }
    ensure(mean_err <= 1e-10, || format!("mean error {mean_err:e}"))?;
    ensure(xi_err <= 1e-12, || format!("E[xi] error {xi_err:e}"))?;
    let (mut sym_err, mut var_err): (f64, f64) = (0.0, 0.0);
    for m in 1..=8 {
        let d = tau_pmf(m, m).map_err(|e| e.to_string())?;
        for a in 0..m {
            sym_err = sym_err.max((d.prob(m + a) - d.prob(m - a)).abs());
        }
        let v = (m * (m - 1)) as f64 / (2 * m - 1) as f64;
        var_err = var_err
            .max((d.variance() - v).abs())
            .max((tau_variance_equal(m) - v).abs());
    }
    ensure(sym_err <= 1e-10, || format!("symmetry error {sym_err:e}"))?;
    ensure(var_err <= 1e-10, || format!("variance error {var_err:e}"))?;
    Ok(format!(
        "mean err {mean_err:.1e}, E[xi] err {xi_err:.1e}, symmetry err {sym_err:.1e}, variance err {var_err:.1e}"
    ))
}

fn c3_u_statistic_convergence() -> Check {
    let mut s = make_stream(key(3, 0));
    let labels = balanced_labels(12, &mut s);
    // a mild shift so the target is not the null value
    let values: Vec<f64> = labels
        .iter()
        .map(|&l| s.uniform_f64() + 0.3 * (1 - l) as f64)
        .collect();
    let sample = LabeledSample::new(labels, values).map_err(|e| e.to_string())?;
    let perm = rank_values(sample.values(), &mut s).map_err(|e| e.to_string())?;
    let design = build_design(12, 5, 100_000, key(3, 1)).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for kernel in [Kernel::Auc, Kernel::Xi] {
        let exact = exhaustive_u_statistic(&sample, &perm, 5, kernel).map_err(|e| e.to_string())?;
        let mc = resampled_summary(&sample, &perm, &design, kernel).map_err(|e| e.to_string())?;
        let z = (mc.mean - exact).abs() / mc.std_error;
        ensure(z <= 4.0, || {
            format!("{}: |diff|/SE = {z:.2}", kernel.name())
        })?;
        parts.push(format!(
            "{}: exhaustive {exact:.5}, l=1e5 {:.5} (SE {:.1e}, z {z:.2})",
            kernel.name(),
            mc.mean,
            mc.std_error
        ));
    }
    Ok(parts.join("; "))
}

fn c4_bootstrap_bias() -> Check {
    let (mut boot, mut res) = (0.0, 0.0);
    let seeds = 20;
    for seed in 0..seeds {
        let mut s = make_stream(key(4, seed));
        let sample = null_sample(200, &mut s);
        let perm = rank_values(sample.values(), &mut s).map_err(|e| e.to_string())?;
        boot += bootstrap_xi_with_replacement(
            &sample,
            &perm,
            1000,
            StreamKey::scoped(seed, Purpose::Bootstrap, 0, 0),
        )
        .map_err(|e| e.to_string())?;
        let design = build_design(
            200,
            50,
            1000,
            StreamKey::scoped(seed, Purpose::Design, 0, 0),
        )
        .map_err(|e| e.to_string())?;
        res += resampled_xi(&sample, &perm, &design).map_err(|e| e.to_string())?;
    }
    boot /= seeds as f64;
    res /= seeds as f64;
    ensure(boot >= 0.25, || {
        format!("bootstrap mean xi {boot:.4} < 0.25")
    })?;
    ensure(res.abs() <= 0.05, || format!("resampled mean xi {res:.4}"))?;
    Ok(format!(
        "bootstrap mean xi {boot:.4}, resampled mean xi {res:.5}"
    ))
}

fn c5_pvalue_validity() -> Check {
    // exhaustive mode against the arrangement-enumeration oracle
    let mut compared = 0;
    for n in 2..=7usize {
        for rep in 0..6u64 {
            let mut s = make_stream(key(5, (n as u64) << 8 | rep));
            let n1 = 1 + s.uniform_below(n - 1);
            let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < n1)).collect();
            s.shuffle(&mut labels);
            let values: Vec<f64> = (0..n).map(|_| s.uniform_f64()).collect();
            let perm = rank_values(&values, &mut s).map_err(|e| e.to_string())?;
            let m = 1 + s.uniform_below(n);
            let design =
                build_design(n, m, 7, key(5, 1000 + compared)).map_err(|e| e.to_string())?;
            let cases: Vec<(Box<dyn stabsel::mc::LabelStatistic>, Alternative, f64)> = vec![
                (
                    Box::new(PlainStatistic::new(&perm, Kernel::Auc)),
                    Alternative::TwoSided,
                    0.5,
                ),
                (
                    Box::new(PlainStatistic::new(&perm, Kernel::Auc)),
                    Alternative::Greater,
                    0.5,
                ),
                (
                    Box::new(PlainStatistic::new(&perm, Kernel::Xi)),
                    Alternative::Greater,
                    0.0,
                ),
                (
                    Box::new(ResampledStatistic::new(
                        PreparedDesign::new(&design, &perm).map_err(|e| e.to_string())?,
                        Kernel::Xi,
                    )),
                    Alternative::Greater,
                    0.0,
                ),
                (
                    Box::new(ResampledStatistic::new(
                        PreparedDesign::new(&design, &perm).map_err(|e| e.to_string())?,
                        Kernel::Auc,
                    )),
                    Alternative::TwoSided,
                    0.5,
                ),
            ];
            for (stat, alt, center) in &cases {
                let scheme = PermutationScheme {
                    n_perm: 10,
                    key: key(5, 2000),
                    alternative: *alt,
                };
                let out = permutation_test(stat.as_ref(), &labels, &scheme, *center);
                let oracle = brute_permutation_pvalue(
                    |l| stat.evaluate(l),
                    &labels,
                    *alt,
                    *center,
                    EnumerationBudget::default(),
                )
                .map_err(|e| e.to_string())?;
                ensure(out.exhaustive && out.pvalue == oracle, || {
                    format!("n={n}: mc {} vs oracle {oracle}", out.pvalue)
                })?;
                compared += 1;
            }
        }
    }

    // calibration under the null
    let n = 40;
    let datasets = 2000;
    let alpha = 0.05;
    let gen = |i: usize| -> stabsel::Result<LabeledSample> {
        let mut s = make_stream(key(55, i as u64));
        Ok(null_sample(n, &mut s))
    };
    let u_null = UNullDistribution::new(20, 20).map_err(|e| e.to_string())?;
    let tau = tau_pmf(20, 20).map_err(|e| e.to_string())?;
    let ties = |i: usize| make_stream(StreamKey::scoped(5, Purpose::TieBreak, i as u64, 0));
    let perm_key = |i: usize| StreamKey::scoped(5, Purpose::Permutation, i as u64, 0);

    let mut report = vec![format!("{compared} exhaustive cases identical")];
    let mut failures = Vec::new();
    type PFn<'a> = Box<dyn Fn(usize, &LabeledSample) -> stabsel::Result<f64> + Sync + 'a>;
    let methods: Vec<(&str, PFn)> = vec![
        (
            "plain AUC (mc, 999 perms)",
            Box::new(|i, s: &LabeledSample| {
                let perm = rank_values(s.values(), &mut ties(i))?;
                let scheme = PermutationScheme {
                    n_perm: 999,
                    key: perm_key(i),
                    alternative: Alternative::TwoSided,
                };
                Ok(permutation_test(
                    &PlainStatistic::new(&perm, Kernel::Auc),
                    s.labels(),
                    &scheme,
                    0.5,
                )
                .pvalue)
            }),
        ),
        (
            "plain AUC (exact)",
            Box::new(|i, s: &LabeledSample| {
                let perm = rank_values(s.values(), &mut ties(i))?;
                let sum = OrderedLabelSummary::from_ordered(perm.labels_in_order(s.labels()));
                Ok(u_null.pvalue(sum.u().expect("both groups") as f64, Alternative::TwoSided))
            }),
        ),
        (
            "plain xi (exact)",
            Box::new(|i, s: &LabeledSample| {
                let perm = rank_values(s.values(), &mut ties(i))?;
                let sum = OrderedLabelSummary::from_ordered(perm.labels_in_order(s.labels()));
                xi_exact_pvalue_with(&tau, sum.xi())
            }),
        ),
        (
            "resampled xi (m=20, l=200, 499 perms)",
            Box::new(|i, s: &LabeledSample| {
                let perm = rank_values(s.values(), &mut ties(i))?;
                let design = build_design(
                    n,
                    20,
                    200,
                    StreamKey::scoped(5, Purpose::Design, i as u64, 0),
                )?;
                let stat =
                    ResampledStatistic::new(PreparedDesign::new(&design, &perm)?, Kernel::Xi);
                let scheme = PermutationScheme {
                    n_perm: 499,
                    key: perm_key(i),
                    alternative: Alternative::Greater,
                };
                Ok(permutation_test(&stat, s.labels(), &scheme, 0.0).pvalue)
            }),
        ),
    ];
    for (name, pfn) in &methods {
        let summary = pvalue_uniformity_diagnostic(gen, |i, s| pfn(i, s), datasets)
            .map_err(|e| e.to_string())?;
        let rate = summary.rejection_rate(alpha);
        let bound = summary.rejection_bound(alpha, 3.0);
        report.push(format!(
            "{name}: P(p<=0.05)={rate:.4} (bound {bound:.4}, KS {:.3})",
            summary.max_deviation
        ));
        if rate > bound {
            failures.push(format!("{name}: rejection rate {rate:.4} > {bound:.4}"));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(report.join("; "))
}

/// Largest k with p_(k) <= k alpha / (p c(p)), by a plain scan.
fn brute_k_star(p: &[f64], alpha: f64) -> usize {
    let m = p.len();
    let c: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
    let mut sorted = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut k_star = 0;
    for k in 1..=m {
        if sorted[k - 1] <= k as f64 * alpha / (m as f64 * c) {
            k_star = k;
        }
    }
    k_star
}

fn c6_by_and_fdr() -> Check {
    let hand = by_select(
        &PValueVector::new(vec![0.01, 0.04, 0.5]).map_err(|e| e.to_string())?,
        0.15,
    )
    .map_err(|e| e.to_string())?;
    ensure(hand.selected == vec![0, 1], || {
        format!("hand example selected {:?}", hand.selected)
    })?;

    let mut s = make_stream(key(6, 0));
    for case in 0..10_000 {
        let m = 1 + s.uniform_below(40);
        let alpha = 0.01 + 0.3 * s.uniform_f64();
        // a mix of small p-values, uniform noise and repeated values
        let p: Vec<f64> = (0..m)
            .map(|_| match s.uniform_below(3) {
                0 => 1e-4 + 0.01 * s.uniform_f64(),
                1 => 1e-6 + s.uniform_f64() * (1.0 - 1e-6),
                _ => 0.002,
            })
            .collect();
        let sel = by_select(
            &PValueVector::new(p.clone()).map_err(|e| e.to_string())?,
            alpha,
        )
        .map_err(|e| e.to_string())?;
        let k = brute_k_star(&p, alpha);
        ensure(sel.selected.len() == k, || {
            format!(
                "case {case}: selected {} vs brute k* {k}",
                sel.selected.len()
            )
        })?;
        let mut ranked: Vec<usize> = (0..m).collect();
        ranked.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
        let mut expect: Vec<usize> = ranked[..k].to_vec();
        expect.sort_unstable();
        ensure(sel.selected == expect, || {
            format!("case {case}: wrong selected set")
        })?;
    }

    let mut report = vec!["hand example and 10^4 brute k* scans agree".to_string()];
    for rho in [0.0, 0.5] {
        let est = fdr_simulation(&FdrSimulationConfig {
            n: 60,
            p: 200,
            n_nonnull: 20,
            effect: 1.5,
            rho,
            alpha: 0.15,
            procedure: FdrProcedure::By,
            reps: 500,
            seed: 6,
        })
        .map_err(|e| e.to_string())?;
        let bound = 0.15 + 3.0 * est.std_error;
        ensure(est.fdr <= bound, || {
            format!("rho={rho}: FDR {:.4} > {bound:.4}", est.fdr)
        })?;
        report.push(format!(
            "rho={rho}: FDR {:.4} (SE {:.4}), mean rejections {:.1}",
            est.fdr, est.std_error, est.mean_rejections
        ));
    }
    Ok(report.join("; "))
}

fn c7_stability() -> Check {
    let mut s = make_stream(key(7, 0));
    for case in 0..500 {
        let k = 1 + s.uniform_below(5);
        let p = 1 + s.uniform_below(60);
        let scores: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..p).map(|_| s.uniform_below(8) as f64).collect())
            .collect();
        let grid: Vec<usize> = (1..=p).collect();
        let curve =
            StabilityCurve::from_scores(scores.clone(), &grid).map_err(|e| e.to_string())?;
        let mut prev = 0;
        for (&sv, &c) in curve.s_values.iter().zip(&curve.counts) {
            ensure(c <= sv && c >= prev, || {
                format!("case {case}: not monotone/bounded at s={sv}")
            })?;
            prev = c;
            // direct intersection of the top-s sets
            let mut inter = top_s(&scores[0], sv).map_err(|e| e.to_string())?;
            for f in &scores[1..] {
                let t = top_s(f, sv).map_err(|e| e.to_string())?;
                inter.retain(|x| t.contains(x));
            }
            ensure(inter.len() == c, || {
                format!("case {case}: count mismatch at s={sv}")
            })?;
        }
        let same = vec![scores[0].clone(); k];
        for sv in 1..=p {
            ensure(
                stability_count(&same, sv).map_err(|e| e.to_string())? == sv,
                || format!("case {case}: identical rankings at s={sv}"),
            )?;
        }
    }

    // pure noise against the random-intersection baseline
    let (p, k, seeds) = (200usize, 4usize, 50u64);
    let grid = [10usize, 25, 50, 75, 100, 125, 150];
    let mut counts = vec![Vec::new(); grid.len()];
    for seed in 0..seeds {
        let data = generate_synthetic(&SyntheticSpec {
            n: 80,
            p,
            n_nonnull: 0,
            shift: 0.0,
            rho: 0.0,
            key: key(77, seed),
        })
        .map_err(|e| e.to_string())?
        .data;
        let config = RunConfig {
            folds: k,
            seed,
            ..RunConfig::default()
        };
        let curve = run_stability(&data, &config, &grid).map_err(|e| e.to_string())?;
        for (i, &c) in curve.counts.iter().enumerate() {
            counts[i].push(c as f64);
        }
    }
    let mut report = vec!["500 randomized instances ok".to_string()];
    for (i, &sv) in grid.iter().enumerate() {
        let base = random_intersection_baseline(p, sv, k);
        let c = &counts[i];
        let mean = c.iter().sum::<f64>() / seeds as f64;
        let var = c.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds as f64 - 1.0);
        // Poisson floor for the SE when few seeds see any overlap
        let se = (var / seeds as f64)
            .sqrt()
            .max((base / seeds as f64).sqrt());
        let z = (mean - base) / se;
        ensure(z.abs() <= 4.0, || {
            format!("s={sv}: mean {mean:.3} vs baseline {base:.3} (z {z:.2})")
        })?;
        report.push(format!("s={sv}: {mean:.2} vs {base:.2}"));
    }
    Ok(report.join("; "))
}

fn c8_ell_sweep() -> Check {
    let seeds = 20u64;
    let mut differing = 0;
    let mut rows_out = Vec::new();
    for seed in 0..seeds {
        let data = generate_synthetic(&SyntheticSpec {
            n: 100,
            p: 40,
            n_nonnull: 10,
            shift: 1.0,
            rho: 0.0,
            key: key(8, seed),
        })
        .map_err(|e| e.to_string())?
        .data;
        let config = RunConfig {
            kernel: Kernel::Xi,
            resample: true,
            m: 20,
            n_perm: 999,
            alpha: 0.15,
            fdr: FdrProcedure::By,
            folds: 1,
            seed,
            ..RunConfig::default()
        };
        let rows = run_ell_sweep(&data, &config, &[10, 100, 1000]).map_err(|e| e.to_string())?;
        let r: Vec<usize> = rows.iter().map(|x| x.rejections).collect();
        if r.iter().any(|&x| x != r[0]) {
            differing += 1;
        }
        rows_out.push(format!("{r:?}"));
    }
    let frac = differing as f64 / seeds as f64;
    ensure(frac >= 0.8, || {
        format!(
            "counts differ in {differing}/{seeds} seeds: {}",
            rows_out.join(" ")
        )
    })?;
    Ok(format!(
        "counts differ across l in {differing}/{seeds} seeds; rejections (l=10,100,1000): {}",
        rows_out.join(" ")
    ))
}

fn c9_determinism() -> Check {
    let data = generate_synthetic(&SyntheticSpec {
        n: 80,
        p: 60,
        n_nonnull: 6,
        shift: 1.0,
        rho: 0.2,
        key: key(9, 0),
    })
    .map_err(|e| e.to_string())?
    .data;
    let configs = [
        RunConfig {
            kernel: Kernel::Xi,
            resample: true,
            m: 30,
            ell: 50,
            n_perm: 2000,
            seed: 9,
            ..RunConfig::default()
        },
        RunConfig {
            kernel: Kernel::Auc,
            n_perm: 3000,
            seed: 9,
            ..RunConfig::default()
        },
        RunConfig {
            kernel: Kernel::Xi,
            pvalue_mode: PValueMode::Exact,
            seed: 9,
            ..RunConfig::default()
        },
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (ci, config) in configs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in [1usize, 8, 1, 8].into_iter().enumerate() {
            let cfg = RunConfig {
                threads,
                ..config.clone()
            };
            let out = dir.path().join(format!("c{ci}-r{run}"));
            let res = run_selection(&data, &cfg).map_err(|e| e.to_string())?;
            write_selection(&out, &res).map_err(|e| e.to_string())?;
            outputs.push(std::fs::read(out.join("report.tsv")).map_err(|e| e.to_string())?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("config {ci}: report differs between runs")
        })?;
    }
    Ok(format!(
        "{} configurations byte-identical over 1/8/1/8 threads",
        configs.len()
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "tau distribution exactness",
            limit: Duration::from_secs(5),
            run: c1_tau_exactness,
        },
        Criterion {
            id: 2,
            name: "jump-count moments",
            limit: Duration::from_secs(5),
            run: c2_lemma_moments,
        },
        Criterion {
            id: 3,
            name: "U-statistic Monte Carlo convergence",
            limit: Duration::from_secs(30),
            run: c3_u_statistic_convergence,
        },
        Criterion {
            id: 4,
            name: "bootstrap bias vs subsampling",
            limit: Duration::from_secs(60),
            run: c4_bootstrap_bias,
        },
        Criterion {
            id: 5,
            name: "p-value validity",
            limit: Duration::from_secs(300),
            run: c5_pvalue_validity,
        },
        Criterion {
            id: 6,
            name: "BY correctness and FDR control",
            limit: Duration::from_secs(300),
            run: c6_by_and_fdr,
        },
        Criterion {
            id: 7,
            name: "stability metric",
            limit: Duration::from_secs(120),
            run: c7_stability,
        },
        Criterion {
            id: 8,
            name: "ell-sweep rejections vary",
            limit: Duration::from_secs(300),
            run: c8_ell_sweep,
        },
        Criterion {
            id: 9,
            name: "thread-count determinism",
            limit: Duration::from_secs(60),
            run: c9_determinism,
        },
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.trim_start_matches('C').parse().ok())
        .collect();
    let mut failed = 0;
    for c in criteria
        .iter()
        .filter(|c| filter.is_empty() || filter.contains(&c.id))
    {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (
                false,
                format!("{d}; runtime {elapsed:.1?} over {:?}", c.limit),
            ),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] C{} {} ({:.2}s): {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
