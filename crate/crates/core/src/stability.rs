//! Cross-validation folds and the stable-feature count `S(M_s)`: the number
//! of features ranked in the top `s` of every fold.

use crate::error::{Error, Result};
use crate::rng::{make_stream, StreamKey};

/// Balanced random assignment of `n` observations to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPartition {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldPartition {
    /// A single fold holding every observation.
    pub fn whole(n: usize) -> Self {
        Self {
            k: 1,
            assignment: vec![0; n],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Observation indices of fold `i`, ascending.
    pub fn fold(&self, i: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(obs, &f)| (f == i).then_some(obs))
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.assignment {
            s[f] += 1;
        }
        s
    }
}

/// Shuffles `[0, n)` and deals observations round-robin, so fold sizes
/// differ by at most one.
pub fn make_folds(n: usize, k: usize, key: StreamKey) -> Result<FoldPartition> {
    if k < 2 || k > n {
        return Err(Error::Domain(format!(
            "fold count k={k} must satisfy 2 <= k <= n={n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    make_stream(key).shuffle(&mut perm);
    let mut assignment = vec![0; n];
    for (pos, &obs) in perm.iter().enumerate() {
        assignment[obs] = pos % k;
    }
    Ok(FoldPartition { k, assignment })
}

/// Ids of the `s` highest scores; ties go to the smaller id.
pub fn top_s(scores: &[f64], s: usize) -> Result<Vec<usize>> {
    if s == 0 || s > scores.len() {
        return Err(Error::Domain(format!(
            "s={s} must satisfy 1 <= s <= p={}",
            scores.len()
        )));
    }
    let mut ids: Vec<usize> = (0..scores.len()).collect();
    ids.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    ids.truncate(s);
    ids.sort_unstable();
    Ok(ids)
}

/// `|∩_i M_s(B_i)|` over the per-fold score vectors.
pub fn stability_count(fold_scores: &[Vec<f64>], s: usize) -> Result<usize> {
    let p = check_consistent(fold_scores)?;
    let mut hits = vec![0usize; p];
    for scores in fold_scores {
        for id in top_s(scores, s)? {
            hits[id] += 1;
        }
    }
    Ok(hits.iter().filter(|&&h| h == fold_scores.len()).count())
}

fn check_consistent(fold_scores: &[Vec<f64>]) -> Result<usize> {
    let p = fold_scores
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Domain("no folds".into()))?;
    if fold_scores.iter().any(|f| f.len() != p) {
        return Err(Error::InconsistentFeatures);
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCurve {
    pub s_values: Vec<usize>,
    pub counts: Vec<usize>,
    /// Per-fold feature scores the curve was built from.
    pub fold_scores: Vec<Vec<f64>>,
}

impl StabilityCurve {
    /// Evaluates `S(M_s)` for each `s` in `s_values`, sorted and deduplicated.
    pub fn from_scores(fold_scores: Vec<Vec<f64>>, s_values: &[usize]) -> Result<Self> {
        let p = check_consistent(&fold_scores)?;
        let mut grid = s_values.to_vec();
        grid.sort_unstable();
        grid.dedup();
        if grid.is_empty() {
            return Err(Error::Domain("empty s grid".into()));
        }
        if let Some(&bad) = grid.iter().find(|&&s| s == 0 || s > p) {
            return Err(Error::Domain(format!(
                "s={bad} must satisfy 1 <= s <= p={p}"
            )));
        }
        // Rank each fold once; position of every feature in its fold's order.
        let positions: Vec<Vec<usize>> = fold_scores
            .iter()
            .map(|scores| {
                let mut ids: Vec<usize> = (0..p).collect();
                ids.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
                let mut pos = vec![0; p];
                for (r, id) in ids.into_iter().enumerate() {
                    pos[id] = r;
                }
                pos
            })
            .collect();
        // A feature is in every top-s set iff its worst position is below s.
        let mut worst: Vec<usize> = (0..p)
            .map(|id| positions.iter().map(|pos| pos[id]).max().unwrap_or(0))
            .collect();
        worst.sort_unstable();
        let counts = grid
            .iter()
            .map(|&s| worst.partition_point(|&w| w < s))
            .collect();
        Ok(Self {
            s_values: grid,
            counts,
            fold_scores,
        })
    }

    /// CSV with header `s,count,method`.
    pub fn to_csv(&self, method: &str) -> String {
        let mut out = String::from("s,count,method\n");
        for (s, c) in self.s_values.iter().zip(&self.counts) {
            out.push_str(&format!("{s},{c},{method}\n"));
        }
        out
    }
}

/// `E|∩ of k independent uniform s-subsets of [p]| = p (s/p)^k`.
pub fn random_intersection_baseline(p: usize, s: usize, k: usize) -> f64 {
    p as f64 * (s as f64 / p as f64).powi(k as i32)
}
