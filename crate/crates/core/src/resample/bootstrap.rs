use std::fmt::Display;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::StdErrorVector;
use crate::error::{Error, Result};
use crate::models::ChoiceDataset;
use crate::seed;

/// Data that can be case-resampled.
pub trait Resample: Sync {
    fn n_obs(&self) -> usize;

    /// A new dataset made of the observations at `indices`.
    fn resample(&self, indices: &[usize]) -> Self;
}

impl Resample for ChoiceDataset {
    fn n_obs(&self) -> usize {
        ChoiceDataset::n_obs(self)
    }

    fn resample(&self, indices: &[usize]) -> Self {
        self.select(indices)
    }
}

impl Resample for Vec<f64> {
    fn n_obs(&self) -> usize {
        self.len()
    }

    fn resample(&self, indices: &[usize]) -> Self {
        indices.iter().map(|&i| self[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// Estimates from the successful replicates, in replicate order.
    pub draws: Vec<Vec<f64>>,
    /// Per-coordinate sample standard deviation of `draws`.
    pub se: StdErrorVector,
    pub replicates: usize,
    pub failures: usize,
    pub seed: u64,
}

/// Case-resampling bootstrap of `fit`.
///
/// Replicate `r` draws `n` indices with replacement from an RNG seeded with
/// `derive(seed, r)` and refits. Failed fits are dropped and counted.
pub fn bootstrap_se<D, F, E>(data: &D, replicates: usize, fit: F, seed: u64) -> Result<BootstrapResult>
where
    D: Resample,
    F: Fn(&D) -> std::result::Result<Vec<f64>, E> + Sync,
    E: Display,
{
    if replicates < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 bootstrap replicates, got {replicates}"
        )));
    }
    let n = data.n_obs();
    let outcomes: Vec<std::result::Result<Vec<f64>, String>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng(seed::derive(seed, r as u64));
            let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let sample = data.resample(&indices);
            match fit(&sample) {
                Ok(theta) if theta.iter().all(|v| v.is_finite()) => Ok(theta),
                Ok(_) => Err("non-finite estimate".to_string()),
                Err(e) => Err(e.to_string()),
            }
        })
        .collect();

    let mut draws = Vec::with_capacity(replicates);
    let mut last_error = String::new();
    for outcome in outcomes {
        match outcome {
            Ok(theta) => draws.push(theta),
            Err(e) => last_error = e,
        }
    }
    let failures = replicates - draws.len();
    if draws.is_empty() {
        return Err(Error::AllFailed {
            attempts: replicates,
            last: last_error,
        });
    }
    if draws.len() < 2 {
        return Err(Error::Optimizer(format!(
            "only one of {replicates} bootstrap replicates succeeded; last error: {last_error}"
        )));
    }
    let p = draws[0].len();
    if draws.iter().any(|d| d.len() != p) {
        return Err(Error::Argument("bootstrap fits returned vectors of differing length".into()));
    }
    let b = draws.len() as f64;
    let se = (0..p)
        .map(|k| {
            let mean = draws.iter().map(|d| d[k]).sum::<f64>() / b;
            let ss: f64 = draws.iter().map(|d| (d[k] - mean).powi(2)).sum();
            (ss / (b - 1.0)).sqrt()
        })
        .collect();
    Ok(BootstrapResult {
        draws,
        se: StdErrorVector::from_raw(se),
        replicates,
        failures,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_fit_has_zero_spread() {
        let data: Vec<f64> = (0..30).map(f64::from).collect();
        let r = bootstrap_se(&data, 20, |_: &Vec<f64>| Ok::<_, String>(vec![1.0, -2.0]), 3).unwrap();
        assert_eq!(r.se.as_slice(), &[0.0, 0.0]);
        assert_eq!(r.draws.len(), 20);
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn failures_are_dropped_and_counted() {
        let data: Vec<f64> = (0..50).map(f64::from).collect();
        let fit = |d: &Vec<f64>| {
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            if mean > 25.5 {
                Err("too large")
            } else {
                Ok(vec![mean])
            }
        };
        let r = bootstrap_se(&data, 100, fit, 8).unwrap();
        assert!(r.failures > 0 && r.failures < 100);
        assert_eq!(r.draws.len() + r.failures, 100);
        assert!(r.draws.iter().all(|d| d[0] <= 25.5));
    }

    #[test]
    fn total_failure_is_an_error() {
        let data = vec![1.0, 2.0];
        let r = bootstrap_se(&data, 5, |_: &Vec<f64>| Err::<Vec<f64>, _>("boom"), 0);
        assert!(matches!(r, Err(Error::AllFailed { attempts: 5, .. })));
        assert!(bootstrap_se(&data, 1, |_: &Vec<f64>| Ok::<_, String>(vec![0.0]), 0).is_err());
    }
}
