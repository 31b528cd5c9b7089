//! Scalar objectives written once against [`Real`] and evaluated on plain
//! floats or on dual numbers.

use crate::autodiff::Real;
use crate::error::EvalError;

/// A scalar function of a parameter vector.
///
/// Implementations must be generic over the scalar type so the same code
/// path serves function values, gradients and Hessians.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn eval<S: Real>(&self, theta: &[S]) -> Result<S, EvalError>;

    /// Plain evaluation; any evaluation error becomes `NaN`.
    fn value(&self, theta: &[f64]) -> f64 {
        self.eval(theta).unwrap_or(f64::NAN)
    }
}

/// A log-likelihood that decomposes into independent per-observation terms.
pub trait Likelihood: Sync {
    fn dim(&self) -> usize;

    fn n_obs(&self) -> usize;

    /// Log-likelihood contribution of observation `i`.
    fn obs_loglik<S: Real>(&self, theta: &[S], i: usize) -> Result<S, EvalError>;

    fn loglik<S: Real>(&self, theta: &[S]) -> Result<S, EvalError> {
        let mut total = S::constant(0.0);
        for i in 0..self.n_obs() {
            total = total + self.obs_loglik(theta, i).map_err(|e| e.at_observation(i))?;
        }
        Ok(total)
    }
}

/// The summed log-likelihood, as an objective to be maximized or differentiated.
#[derive(Debug, Clone, Copy)]
pub struct TotalLogLik<'a, L>(pub &'a L);

impl<L: Likelihood> Objective for TotalLogLik<'_, L> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval<S: Real>(&self, theta: &[S]) -> Result<S, EvalError> {
        self.0.loglik(theta)
    }
}

/// The negated log-likelihood. Optimizers in this crate minimize.
#[derive(Debug, Clone, Copy)]
pub struct NegLogLik<'a, L>(pub &'a L);

impl<L: Likelihood> Objective for NegLogLik<'_, L> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval<S: Real>(&self, theta: &[S]) -> Result<S, EvalError> {
        Ok(-self.0.loglik(theta)?)
    }
}
