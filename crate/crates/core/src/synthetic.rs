//! Synthetic two-class data with planted mean shifts.

use rand_distr::{Distribution, StandardNormal};

use crate::data::DatasetMatrix;
use crate::error::{Error, Result};
use crate::rng::{make_stream, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub p: usize,
    /// The first `n_nonnull` features carry the shift.
    pub n_nonnull: usize,
    /// Upward shift of group 0 in standard deviations, so that planted
    /// features have AUC above 0.5.
    pub shift: f64,
    /// Equicorrelation of all features through a shared per-row factor.
    pub rho: f64,
    pub key: StreamKey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub data: DatasetMatrix,
    /// `nonnull[j]` is true for planted features.
    pub nonnull: Vec<bool>,
}

/// Balanced labels (`n1 = ⌊n/2⌋`) in random order; feature `j` is
/// `√ρ Z + √(1−ρ) E_j + shift · (1 − X)` for planted features and the same
/// without the shift otherwise, all terms standard normal.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    if spec.n < 2 || spec.p == 0 {
        return Err(Error::Domain(format!(
            "synthetic data needs n >= 2 and p >= 1 (got n={}, p={})",
            spec.n, spec.p
        )));
    }
    if spec.n_nonnull > spec.p {
        return Err(Error::Domain(format!(
            "n_nonnull={} exceeds p={}",
            spec.n_nonnull, spec.p
        )));
    }
    if !(0.0..1.0).contains(&spec.rho) || !spec.shift.is_finite() {
        return Err(Error::Domain(
            "rho must lie in [0, 1) and shift must be finite".into(),
        ));
    }
    let mut stream = make_stream(spec.key);
    let n1 = spec.n / 2;
    let mut labels: Vec<u8> = (0..spec.n).map(|i| u8::from(i >= spec.n - n1)).collect();
    stream.shuffle(&mut labels);

    let shared = spec.rho.sqrt();
    let own = (1.0 - spec.rho).sqrt();
    let factor: Vec<f64> = if spec.rho > 0.0 {
        (0..spec.n)
            .map(|_| StandardNormal.sample(&mut stream))
            .collect()
    } else {
        vec![0.0; spec.n]
    };
    let columns: Vec<Vec<f64>> = (0..spec.p)
        .map(|j| {
            let shift = if j < spec.n_nonnull { spec.shift } else { 0.0 };
            (0..spec.n)
                .map(|i| {
                    let e: f64 = StandardNormal.sample(&mut stream);
                    shared * factor[i] + own * e + shift * (1 - labels[i]) as f64
                })
                .collect()
        })
        .collect();
    let width = spec.p.to_string().len();
    let names = (0..spec.p).map(|j| format!("f{:0width$}", j + 1)).collect();
    Ok(SyntheticData {
        data: DatasetMatrix::new(columns, labels, names)?,
        nonnull: (0..spec.p).map(|j| j < spec.n_nonnull).collect(),
    })
}
