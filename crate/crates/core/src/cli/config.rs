use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::covariance::CovMethod;
use crate::error::{Error, Result};
use crate::optimize::{AnnealingSchedule, BfgsOptions, NelderMeadOptions};
use crate::resample::{DEFAULT_PERMUTATIONS, DEFAULT_REPLICATES};
use crate::seed;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    #[default]
    Fit,
    Compare,
    PermTest,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Simulate => "simulate",
            Command::Fit => "fit",
            Command::Compare => "compare",
            Command::PermTest => "perm-test",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    Mnl,
    GaussianMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    #[default]
    Sa,
    Bfgs,
    NelderMead,
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizerKind::Sa => "sa",
            OptimizerKind::Bfgs => "bfgs",
            OptimizerKind::NelderMead => "nelder-mead",
        })
    }
}

/// Synthetic multinomial-logit data, used when no data file is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct SimulationSpec {
    pub alternatives: usize,
    pub covariates: usize,
    pub n: usize,
    /// Explicit true coefficients; drawn as `N(0, theta_scale²)` when absent.
    pub theta_true: Option<Vec<f64>>,
    pub theta_scale: f64,
    pub seed: Option<u64>,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            alternatives: 4,
            covariates: 3,
            n: 500,
            theta_true: None,
            theta_scale: 0.5,
            seed: None,
        }
    }
}

/// Known-sigma normal mean model; data from `value-col` of the data file,
/// or simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct GaussianSpec {
    pub sigma: f64,
    pub value_col: String,
    pub n: usize,
    pub mean: f64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        GaussianSpec {
            sigma: 2.0,
            value_col: "x".into(),
            n: 100,
            mean: 0.0,
        }
    }
}

/// Everything a run needs. Read from TOML, overridden by flags, and echoed
/// into the report once resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelKind,
    pub data: Option<PathBuf>,
    pub choice_col: String,
    /// Covariate columns; all non-choice columns when absent.
    pub covariates: Option<Vec<String>>,
    /// Alternative labels in index order; first-appearance order when absent.
    pub label_order: Option<Vec<String>>,
    pub simulation: SimulationSpec,
    pub gaussian: GaussianSpec,
    pub optimizer: OptimizerKind,
    pub schedule: AnnealingSchedule,
    pub bfgs: BfgsOptions,
    pub nelder_mead: NelderMeadOptions,
    pub bounds: [f64; 2],
    /// Starting points for the gradient arm of `compare`.
    pub starts: usize,
    pub covariance: Vec<CovMethod>,
    pub bootstrap_b: usize,
    pub bootstrap_optimizer: OptimizerKind,
    pub perm_iters: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Vectors compared by `perm-test`.
    pub perm_a: Option<Vec<f64>>,
    pub perm_b: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Fit,
            model: ModelKind::Mnl,
            data: None,
            choice_col: "choice".into(),
            covariates: None,
            label_order: None,
            simulation: SimulationSpec::default(),
            gaussian: GaussianSpec::default(),
            optimizer: OptimizerKind::Sa,
            schedule: AnnealingSchedule::default(),
            bfgs: BfgsOptions::default(),
            nelder_mead: NelderMeadOptions::default(),
            bounds: [-20.0, 20.0],
            starts: 5,
            covariance: CovMethod::ALL.to_vec(),
            bootstrap_b: DEFAULT_REPLICATES,
            bootstrap_optimizer: OptimizerKind::Bfgs,
            perm_iters: DEFAULT_PERMUTATIONS,
            seed: None,
            out: None,
            perm_a: None,
            perm_b: None,
        }
    }
}

/// Independent random streams under the master seed.
pub(crate) mod stream {
    pub const SIMULATION: u64 = 0;
    pub const INIT: u64 = 1;
    pub const ANNEALING: u64 = 2;
    pub const MULTISTART: u64 = 3;
    pub const BOOTSTRAP: u64 = 4;
    pub const PERMUTATION: u64 = 5;
    pub const THETA_TRUE: u64 = 6;
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn master_seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn stream_seed(&self, stream: u64) -> u64 {
        seed::derive(self.master_seed(), stream)
    }

    /// Fills every seed, checks ranges and that referenced files exist.
    pub fn resolve(mut self) -> Result<Self> {
        let master = self.master_seed();
        self.seed = Some(master);
        if self.simulation.seed.is_none() {
            self.simulation.seed = Some(self.stream_seed(stream::SIMULATION));
        }
        self.schedule.seed = self.stream_seed(stream::ANNEALING);
        if let Some(path) = &self.data {
            if !path.exists() {
                return Err(Error::Config(format!("data file {} does not exist", path.display())));
            }
        }
        if !(self.bounds[0] < self.bounds[1]) {
            return Err(Error::Config(format!(
                "bounds must satisfy LO < HI, got {:?}",
                self.bounds
            )));
        }
        if self.starts < 1 {
            return Err(Error::Config("starts must be at least 1".into()));
        }
        if self.covariance.is_empty() {
            return Err(Error::Config("no covariance method requested".into()));
        }
        if self.perm_iters < 1 {
            return Err(Error::Config("perm-iters must be at least 1".into()));
        }
        if self.command == Command::Compare && self.bootstrap_b < 2 {
            return Err(Error::Config("bootstrap-B must be at least 2".into()));
        }
        if self.model == ModelKind::GaussianMean && !(self.gaussian.sigma > 0.0) {
            return Err(Error::Config("gaussian sigma must be positive".into()));
        }
        let mut seen = Vec::new();
        self.covariance.retain(|m| {
            let fresh = !seen.contains(m);
            seen.push(*m);
            fresh
        });
        Ok(self)
    }
}
