use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::resample::{euclidean_distance, PermutationTestResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DatasetSummary {
    pub model: String,
    pub source: String,
    pub n_obs: usize,
    pub alternatives: Option<usize>,
    pub covariates: Option<usize>,
    /// Alternative labels; position `j − 1` holds alternative `j`.
    pub labels: Vec<String>,
    pub covariate_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub failures: usize,
    pub seed: u64,
}

/// One estimation route and its standard errors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ArmReport {
    pub name: String,
    pub optimizer: String,
    /// Set when the arm failed before producing any standard errors.
    pub failure: Option<String>,
    pub theta_hat: Option<Vec<f64>>,
    pub loglik: Option<f64>,
    /// `‖∇ log L(θ̂)‖∞`.
    pub gradient_inf_norm: Option<f64>,
    pub evaluations: Option<usize>,
    pub converged: Option<bool>,
    pub message: Option<String>,
    /// Standard errors keyed by covariance method (`bootstrap` for the
    /// resampling arm).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub standard_errors: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub covariance_failures: BTreeMap<String, String>,
    /// Methods whose matrix needed a diagonal ridge before inversion.
    pub jittered: Vec<String>,
    pub bootstrap: Option<BootstrapSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DistanceRecord {
    pub a: String,
    pub b: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PermutationRecord {
    pub a: String,
    pub b: String,
    pub test: PermutationTestResult,
}

/// Output of `fit`, `compare` and `perm-test`.
///
/// Standard-error vectors are addressed as `arm/method`, e.g.
/// `two-step/hessian`; the bootstrap arm's single vector is `bootstrap`.
/// Floats are written in shortest round-trip form, so reloaded vectors are
/// bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub dataset: Option<DatasetSummary>,
    pub parameter_names: Vec<String>,
    pub theta_true: Option<Vec<f64>>,
    pub arms: Vec<ArmReport>,
    /// Extra named vectors (the inputs of `perm-test`).
    pub vectors: BTreeMap<String, Vec<f64>>,
    pub distances: Vec<DistanceRecord>,
    pub permutation_tests: Vec<PermutationRecord>,
    /// Wall-clock seconds per stage. Not reproducible.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config,
            dataset: None,
            parameter_names: Vec::new(),
            theta_true: None,
            arms: Vec::new(),
            vectors: BTreeMap::new(),
            distances: Vec::new(),
            permutation_tests: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn arm(&self, name: &str) -> Option<&ArmReport> {
        self.arms.iter().find(|a| a.name == name)
    }

    /// A standard-error vector by `arm/method` key, a bare arm name when that
    /// arm has a single vector, or a named extra vector.
    pub fn vector(&self, key: &str) -> Option<&[f64]> {
        if let Some(v) = self.vectors.get(key) {
            return Some(v);
        }
        match key.split_once('/') {
            Some((arm, method)) => self.arm(arm)?.standard_errors.get(method).map(|v| v.as_slice()),
            None => {
                let arm = self.arm(key)?;
                match arm.standard_errors.len() {
                    1 => arm.standard_errors.values().next().map(|v| v.as_slice()),
                    _ => None,
                }
            }
        }
    }

    /// All `arm/method` keys with a standard-error vector.
    pub fn se_keys(&self) -> Vec<String> {
        self.arms
            .iter()
            .flat_map(|a| a.standard_errors.keys().map(move |m| format!("{}/{m}", a.name)))
            .collect()
    }

    pub fn distance(&self, a: &str, b: &str) -> Option<f64> {
        self.distances
            .iter()
            .find(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
            .map(|d| d.distance)
    }

    pub fn permutation(&self, a: &str, b: &str) -> Option<&PermutationTestResult> {
        self.permutation_tests
            .iter()
            .find(|p| p.a == a && p.b == b)
            .map(|p| &p.test)
    }

    /// Largest gap between a stored distance and the distance recomputed
    /// from the report's own vectors.
    pub fn distance_drift(&self) -> Result<f64> {
        let mut worst = 0.0_f64;
        for d in &self.distances {
            let (Some(a), Some(b)) = (self.vector(&d.a), self.vector(&d.b)) else {
                return Err(Error::Argument(format!(
                    "distance {} vs {} refers to a missing vector",
                    d.a, d.b
                )));
            };
            worst = worst.max((euclidean_distance(a, b)? - d.distance).abs());
        }
        Ok(worst)
    }

    /// The report with timings cleared, for reproducibility comparisons.
    pub fn without_timings(&self) -> Report {
        Report {
            timings: BTreeMap::new(),
            ..self.clone()
        }
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
