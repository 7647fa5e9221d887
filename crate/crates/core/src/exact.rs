//! Exact null distributions conditional on the group sizes.
//!
//! Under homogeneity the labels read in value order are uniform over all
//! binary sequences with `n0` zeros and `n1` ones. This module gives the law
//! of the jump count τ of such a sequence (and hence of ξ), and the law of the
//! Mann–Whitney U.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::xi_from_jumps;

/// Tolerance when inverting an observed ξ to an integer jump count.
pub const XI_INVERSION_TOL: f64 = 1e-9;

/// Largest `n0 * n1` for which [`UNullDistribution::new`] runs; the
/// construction costs about `(n0 n1)^2 / 4` operations.
pub const U_EXACT_MAX_CELLS: usize = 40_000;

/// Binomial coefficient as `f64`. Exact integer arithmetic for `n <= 128`
/// (every `C(n, k)` fits in a `u128`), log-domain summation beyond.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 128 {
        binomial_u128(n, k) as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// Exact `C(n, k)`; callers keep `n <= 128`.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i; C(n,i) fits, the product may not for n near 128.
        let num = n as u128 - k as u128 + i;
        let g = gcd(acc, i);
        acc = (acc / g) * (num / (i / g));
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Ratio `C(a, h) C(b, h) / C(a + b, a)`.
fn binomial_ratio(a: u64, b: u64, h: u64) -> f64 {
    let n = a + b;
    if h > a || h > b {
        return 0.0;
    }
    if n <= 128 {
        // By Vandermonde C(a,h) C(b,h) <= C(n,a), so the product fits too.
        let num = binomial_u128(a, h) * binomial_u128(b, h);
        num as f64 / binomial_u128(n, a) as f64
    } else {
        (ln_binomial(a, h) + ln_binomial(b, h) - ln_binomial(n, a)).exp()
    }
}

/// Law of the jump count τ for a uniform sequence in `B_{n0,n1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauDistribution {
    n0: usize,
    n1: usize,
    pmf: Vec<f64>,
}

impl TauDistribution {
    /// Wraps a pmf over `1..=pmf.len()` without checking it.
    pub fn from_parts(n0: usize, n1: usize, pmf: Vec<f64>) -> Self {
        Self { n0, n1, pmf }
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Largest attainable τ: `2 min(n0, n1) − [n0 = n1]`.
    pub fn max_tau(&self) -> usize {
        self.pmf.len()
    }

    /// Support points `1..=max_tau`.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        1..=self.pmf.len()
    }

    /// `pmf()[x - 1] = P(τ = x)`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, tau: usize) -> f64 {
        if tau == 0 || tau > self.pmf.len() {
            0.0
        } else {
            self.pmf[tau - 1]
        }
    }

    pub fn cdf(&self, tau: usize) -> f64 {
        let k = tau.min(self.pmf.len());
        self.pmf[..k].iter().sum::<f64>().min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn second_moment(&self) -> f64 {
        self.moment(2)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| p * ((i + 1) as f64 - m).powi(2))
            .sum()
    }

    fn moment(&self, k: i32) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| p * ((i + 1) as f64).powi(k))
            .sum()
    }

    /// E[ξ] where ξ = 1 − nτ/(2 n0 n1).
    pub fn xi_mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| p * xi_from_jumps(i + 1, self.n0, self.n1))
            .sum()
    }
}

/// Closed-form pmf of τ.
///
/// With `G(x) = C(n0, x/2) C(n1, x/2) / (2 n0 n1 C(n, n0))`:
/// `P(τ = x) = (x+1)^2 G(x+1)` for odd `x` and `(n x − x^2) G(x)` for even `x`.
pub fn tau_pmf(n0: usize, n1: usize) -> Result<TauDistribution> {
    if n0 == 0 || n1 == 0 {
        return Err(Error::Domain(format!(
            "tau distribution needs n0, n1 >= 1 (got {n0}, {n1})"
        )));
    }
    let n = (n0 + n1) as f64;
    let max_tau = 2 * n0.min(n1) - usize::from(n0 == n1);
    let scale = 2.0 * n0 as f64 * n1 as f64;
    let pmf = (1..=max_tau)
        .map(|x| {
            let xf = x as f64;
            let (weight, h) = if x % 2 == 1 {
                ((xf + 1.0) * (xf + 1.0), x.div_ceil(2))
            } else {
                (n * xf - xf * xf, x / 2)
            };
            weight * binomial_ratio(n0 as u64, n1 as u64, h as u64) / scale
        })
        .collect();
    Ok(TauDistribution { n0, n1, pmf })
}

/// `E[τ] = 2 n0 n1 / n`.
pub fn tau_mean(n0: usize, n1: usize) -> f64 {
    2.0 * n0 as f64 * n1 as f64 / (n0 + n1) as f64
}

/// `Var(τ) = m(m − 1)/(2m − 1)` when `n0 = n1 = m`.
pub fn tau_variance_equal(m: usize) -> f64 {
    let m = m as f64;
    m * (m - 1.0) / (2.0 * m - 1.0)
}

/// Maps an observed ξ back to its jump count.
pub fn xi_to_tau(observed_xi: f64, n0: usize, n1: usize) -> Result<usize> {
    let unattainable = Error::UnattainableXi {
        xi: observed_xi,
        n0,
        n1,
    };
    if n0 == 0 || n1 == 0 || !observed_xi.is_finite() {
        return Err(unattainable);
    }
    let n = (n0 + n1) as f64;
    let tau = (1.0 - observed_xi) * 2.0 * n0 as f64 * n1 as f64 / n;
    let rounded = tau.round();
    let max_tau = 2 * n0.min(n1) - usize::from(n0 == n1);
    if (tau - rounded).abs() > XI_INVERSION_TOL || rounded < 1.0 || rounded > max_tau as f64 {
        return Err(unattainable);
    }
    Ok(rounded as usize)
}

/// One-sided exact p-value `P(ξ ≥ observed) = P(τ ≤ τ_obs)`.
pub fn xi_exact_pvalue(observed_xi: f64, n0: usize, n1: usize) -> Result<f64> {
    let tau = xi_to_tau(observed_xi, n0, n1)?;
    Ok(tau_pmf(n0, n1)?.cdf(tau))
}

/// Same as [`xi_exact_pvalue`] against a prebuilt distribution.
pub fn xi_exact_pvalue_with(dist: &TauDistribution, observed_xi: f64) -> Result<f64> {
    let tau = xi_to_tau(observed_xi, dist.n0, dist.n1)?;
    Ok(dist.cdf(tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

impl std::str::FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-sided" | "two_sided" => Ok(Self::TwoSided),
            "greater" => Ok(Self::Greater),
            "less" => Ok(Self::Less),
            other => Err(Error::Config(format!("unknown alternative '{other}'"))),
        }
    }
}

/// Exact null law of U over `{0, …, n0 n1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UNullDistribution {
    n0: usize,
    n1: usize,
    pmf: Vec<f64>,
}

impl UNullDistribution {
    /// Builds the law from the recurrence on the group of the largest value:
    /// `p(i, j; u) = i/(i+j) p(i−1, j; u − j) + j/(i+j) p(i, j−1; u)`.
    pub fn new(n0: usize, n1: usize) -> Result<Self> {
        if n0 == 0 || n1 == 0 {
            return Err(Error::Domain(format!(
                "U distribution needs n0, n1 >= 1 (got {n0}, {n1})"
            )));
        }
        if n0 * n1 > U_EXACT_MAX_CELLS {
            return Err(Error::Domain(format!(
                "exact U distribution limited to n0*n1 <= {U_EXACT_MAX_CELLS} (got {})",
                n0 * n1
            )));
        }
        // prev[j] = law for (i − 1, j); cur[j] = law for (i, j).
        let mut prev: Vec<Vec<f64>> = (0..=n1).map(|_| vec![1.0]).collect();
        for i in 1..=n0 {
            let mut cur: Vec<Vec<f64>> = Vec::with_capacity(n1 + 1);
            cur.push(vec![1.0]);
            for j in 1..=n1 {
                let tot = (i + j) as f64;
                let a = i as f64 / tot;
                let b = j as f64 / tot;
                let mut row = vec![0.0; i * j + 1];
                for (u, p) in prev[j].iter().enumerate() {
                    row[u + j] += a * p;
                }
                for (u, p) in cur[j - 1].iter().enumerate() {
                    row[u] += b * p;
                }
                cur.push(row);
            }
            prev = cur;
        }
        let pmf = prev.pop().expect("n1 >= 1");
        Ok(Self { n0, n1, pmf })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    /// `pmf()[u] = P(U = u)`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(u, p)| u as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(u, p)| (u as f64 - m).powi(2) * p)
            .sum()
    }

    /// `P(U >= u)`.
    pub fn upper_tail(&self, u: f64) -> f64 {
        let start = (u - XI_INVERSION_TOL).ceil().max(0.0) as usize;
        if start >= self.pmf.len() {
            return 0.0;
        }
        self.pmf[start..].iter().sum::<f64>().min(1.0)
    }

    /// `P(U <= u)`.
    pub fn lower_tail(&self, u: f64) -> f64 {
        let end = (u + XI_INVERSION_TOL).floor();
        if end < 0.0 {
            return 0.0;
        }
        let end = (end as usize).min(self.pmf.len() - 1);
        self.pmf[..=end].iter().sum::<f64>().min(1.0)
    }

    pub fn pvalue(&self, observed_u: f64, alternative: Alternative) -> f64 {
        match alternative {
            Alternative::Greater => self.upper_tail(observed_u),
            Alternative::Less => self.lower_tail(observed_u),
            Alternative::TwoSided => {
                (2.0 * self.upper_tail(observed_u).min(self.lower_tail(observed_u))).min(1.0)
            }
        }
    }
}

pub fn u_exact_pvalue(
    observed_u: f64,
    n0: usize,
    n1: usize,
    alternative: Alternative,
) -> Result<f64> {
    Ok(UNullDistribution::new(n0, n1)?.pvalue(observed_u, alternative))
}

/// Continuity-corrected normal approximation with mean `n0 n1/2` and variance
/// `n0 n1 (n+1)/12`.
pub fn u_normal_approx_pvalue(
    observed_u: f64,
    n0: usize,
    n1: usize,
    alternative: Alternative,
) -> Result<f64> {
    if n0 == 0 || n1 == 0 {
        return Err(Error::DegenerateGroup { n0, n1 });
    }
    let (a, b) = (n0 as f64, n1 as f64);
    let mean = a * b / 2.0;
    let sd = (a * b * (a + b + 1.0) / 12.0).sqrt();
    let z = Normal::new(0.0, 1.0).expect("standard normal");
    let greater = z.sf((observed_u - 0.5 - mean) / sd);
    let less = z.cdf((observed_u + 0.5 - mean) / sd);
    Ok(match alternative {
        Alternative::Greater => greater,
        Alternative::Less => less,
        Alternative::TwoSided => (2.0 * greater.min(less)).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial_u128(6, 3), 20);
        assert_eq!(binomial_u128(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(
            binomial_u128(128, 64),
            23_951_146_041_928_082_866_135_587_776_380_551_750
        );
        assert_eq!(binomial_u128(5, 7), 0);
        let rel = (binomial(200, 100) / 9.054851465610328e58 - 1.0).abs();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn tau_small_cases() {
        let d = tau_pmf(1, 1).unwrap();
        assert_eq!(d.max_tau(), 1);
        assert!((d.prob(1) - 1.0).abs() < 1e-15);
        let d = tau_pmf(1, 2).unwrap();
        assert_eq!(d.max_tau(), 2);
        assert!((d.prob(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.prob(2) - 1.0 / 3.0).abs() < 1e-15);
        assert!(tau_pmf(0, 3).is_err());
    }

    #[test]
    fn tau_symmetric_for_equal_groups() {
        for m in 1..=8 {
            let d = tau_pmf(m, m).unwrap();
            assert_eq!(d.max_tau(), 2 * m - 1);
            for a in 1..m {
                assert!((d.prob(m + a) - d.prob(m - a)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tau_moments() {
        assert!((tau_mean(1, 2) - 4.0 / 3.0).abs() < 1e-15);
        assert!((tau_pmf(1, 2).unwrap().mean() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(tau_mean(1, 1), 1.0);
        assert_eq!(tau_mean(3, 3), 3.0);
        assert_eq!(tau_variance_equal(1), 0.0);
        assert!((tau_variance_equal(2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((tau_pmf(2, 2).unwrap().variance() - 2.0 / 3.0).abs() < 1e-14);
        assert!((tau_variance_equal(5) - 20.0 / 9.0).abs() < 1e-14);
        let d = tau_pmf(5, 5).unwrap();
        let m = 5.0;
        assert!((d.second_moment() - m * (2.0 * m * m - 1.0) / (2.0 * m - 1.0)).abs() < 1e-12);
        assert!((d.variance() - 20.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn large_groups_use_log_domain() {
        let d = tau_pmf(90, 110).unwrap();
        let total: f64 = d.pmf().iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
        assert!((d.mean() - tau_mean(90, 110)).abs() < 1e-8);
    }

    #[test]
    fn xi_pvalues() {
        assert!((xi_exact_pvalue(0.25, 1, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((xi_exact_pvalue(-0.5, 1, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            xi_exact_pvalue(0.3, 1, 2),
            Err(Error::UnattainableXi { .. })
        ));
        // τ = 0 is impossible with both groups present
        assert!(xi_exact_pvalue(1.0, 2, 2).is_err());
        for n0 in 1..8 {
            for n1 in 1..8 {
                let d = tau_pmf(n0, n1).unwrap();
                let p = xi_exact_pvalue(xi_from_jumps(1, n0, n1), n0, n1).unwrap();
                assert!(p > 0.0 && p <= 1.0);
                assert!((p - d.prob(1)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn u_exact_examples() {
        assert!((u_exact_pvalue(1.0, 1, 1, Alternative::Greater).unwrap() - 0.5).abs() < 1e-15);
        assert!(
            (u_exact_pvalue(4.0, 2, 2, Alternative::Greater).unwrap() - 1.0 / 6.0).abs() < 1e-15
        );
        for (n0, n1) in [(2, 2), (3, 5), (4, 4), (7, 3)] {
            let c = (n0 * n1) as f64 / 2.0;
            let p = u_exact_pvalue(c, n0, n1, Alternative::TwoSided).unwrap();
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn u_law_moments() {
        for (n0, n1) in [(1, 1), (3, 4), (10, 12), (25, 25)] {
            let d = UNullDistribution::new(n0, n1).unwrap();
            let (a, b) = (n0 as f64, n1 as f64);
            assert!((d.pmf().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((d.mean() - a * b / 2.0).abs() < 1e-9);
            assert!((d.variance() - a * b * (a + b + 1.0) / 12.0).abs() < 1e-8);
        }
        assert!(UNullDistribution::new(201, 200).is_err());
    }

    #[test]
    fn normal_approximation() {
        let p = u_normal_approx_pvalue(12.0, 4, 6, Alternative::TwoSided).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let approx = u_normal_approx_pvalue(1800.0, 50, 50, Alternative::Greater).unwrap();
        let exact = u_exact_pvalue(1800.0, 50, 50, Alternative::Greater).unwrap();
        assert!((approx - exact).abs() < 0.01, "{approx} vs {exact}");
        let mut last = 1.0;
        for u in 0..=100 {
            let p = u_normal_approx_pvalue(u as f64, 10, 10, Alternative::Greater).unwrap();
            assert!(p <= last);
            last = p;
        }
    }
}
