//! Minimizers: simulated annealing for global search, BFGS and Nelder-Mead
//! as local baselines, and a multistart wrapper.
//!
//! Everything here minimizes. Log-likelihoods enter through
//! [`NegLogLik`](crate::objective::NegLogLik).

mod anneal;
mod bfgs;
mod multistart;
mod nelder_mead;

pub use anneal::{metropolis_accept, simulated_annealing, simulated_annealing_observed, AnnealingSchedule};
pub use bfgs::{bfgs, BfgsOptions};
pub use multistart::multistart;
pub use nelder_mead::{nelder_mead, NelderMeadOptions};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::autodiff;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::seed;

/// Box constraints, `lower[i] < upper[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Argument(format!(
                "bounds have {} lower and {} upper entries",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i]) || !lower[i].is_finite() || !upper[i].is_finite()) {
            return Err(Error::Argument(format!(
                "bound {i}: need finite lower < upper, got [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Bounds { lower, upper })
    }

    /// The same interval on every coordinate.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Bounds::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| self.lower[i] <= *v && *v <= self.upper[i])
    }

    pub fn clip(&self, x: &mut [f64]) -> bool {
        let mut clipped = false;
        for (i, v) in x.iter_mut().enumerate() {
            let c = v.clamp(self.lower[i], self.upper[i]);
            clipped |= c != *v;
            *v = c;
        }
        clipped
    }

    /// Folds `x` back into `[lower_i, upper_i]` by mirror reflection.
    pub fn reflect(&self, i: usize, x: f64) -> f64 {
        let (lo, hi) = (self.lower[i], self.upper[i]);
        if (lo..=hi).contains(&x) {
            return x;
        }
        let width = hi - lo;
        let y = (x - lo).rem_euclid(2.0 * width);
        let y = if y > width { 2.0 * width - y } else { y };
        (lo + y).clamp(lo, hi)
    }
}

/// Outcome of a minimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub theta_hat: Vec<f64>,
    pub objective: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// `(evaluation index, best objective so far)` at each improvement.
    pub best_trace: Vec<(usize, f64)>,
    /// Candidates discarded because the objective was not finite.
    pub rejected: usize,
    pub message: String,
}

/// `p` independent standard-normal draws.
pub fn random_init(p: usize, seed: u64) -> Result<Vec<f64>> {
    if p < 1 {
        return Err(Error::Argument("dimension must be at least 1".into()));
    }
    let mut rng = seed::rng(seed);
    Ok((0..p).map(|_| rng.sample(StandardNormal)).collect())
}

/// Plain-float view of an objective; evaluation errors become `NaN`.
pub fn objective_fn<O: Objective>(f: &O) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
    move |x| f.value(x)
}

/// AD gradient of an objective; evaluation errors become a `NaN` vector.
pub fn gradient_fn<O: Objective>(f: &O) -> impl Fn(&[f64]) -> Vec<f64> + Sync + '_ {
    move |x| match autodiff::gradient(f, x) {
        Ok(g) => g.into_vec(),
        Err(_) => vec![f64::NAN; x.len()],
    }
}
