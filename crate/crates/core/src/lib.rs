//! Marginal feature screening for binary outcomes with AUC and Chatterjee's ξ,
//! their subsampled U-statistic versions, exact and Monte Carlo null laws,
//! FDR-controlled selection and cross-fold stability.

pub mod data;
pub mod error;
pub mod exact;
pub mod mc;
pub mod multiplicity;
pub mod pipeline;
pub mod resampling;
pub mod rng;
pub mod stability;
pub mod stats;
pub mod synthetic;
pub mod testkit;
pub mod verify;

pub use error::{Error, Result};
