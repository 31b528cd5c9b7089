//! Resampling inference: case-resampling bootstrap of parameter estimates
//! and a permutation test on the Euclidean distance between two vectors.

mod bootstrap;
mod permutation;

pub use bootstrap::{bootstrap_se, BootstrapResult, Resample};
pub use permutation::{permutation_test, PermutationTestResult, DEFAULT_PERMUTATIONS};

use crate::error::{Error, Result};

/// Default bootstrap replicate count.
pub const DEFAULT_REPLICATES: usize = 150;

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "vectors have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(squared_distance(a, b).sqrt())
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
