use std::f64::consts::PI;

use super::LogLikEvaluation;
use crate::autodiff::Real;
use crate::error::{Error, EvalError, Result};
use crate::objective::Likelihood;

/// Normal observations with unknown mean and known standard deviation.
/// The single parameter is the mean.
#[derive(Debug, Clone, Copy)]
pub struct GaussianMean<'a> {
    data: &'a [f64],
    sigma: f64,
}

impl<'a> GaussianMean<'a> {
    pub fn new(data: &'a [f64], sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Argument(format!("sigma must be positive, got {sigma}")));
        }
        if data.is_empty() {
            return Err(Error::Argument("no observations".into()));
        }
        Ok(GaussianMean { data, sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn data(&self) -> &[f64] {
        self.data
    }
}

impl Likelihood for GaussianMean<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn n_obs(&self) -> usize {
        self.data.len()
    }

    fn obs_loglik<S: Real>(&self, theta: &[S], i: usize) -> Result<S, EvalError> {
        if theta.len() != 1 {
            return Err(EvalError::Dimension {
                expected: 1,
                got: theta.len(),
            });
        }
        let var = self.sigma * self.sigma;
        let resid = -theta[0].clone() + self.data[i];
        Ok(resid.powi(2) / (-2.0 * var) - 0.5 * (2.0 * PI * var).ln())
    }
}

pub fn gaussian_loglik(mu: f64, data: &[f64], sigma: f64) -> Result<LogLikEvaluation> {
    let model = GaussianMean::new(data, sigma)?;
    let per_obs = (0..data.len())
        .map(|i| model.obs_loglik(&[mu], i))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(LogLikEvaluation::from_terms(per_obs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_terms() {
        let ev = gaussian_loglik(1.0, &[1.0, 3.0], 2.0).unwrap();
        let c = -0.5 * (8.0 * PI).ln();
        assert!((ev.per_obs[0] - c).abs() < 1e-15);
        assert!((ev.per_obs[1] - (c - 0.5)).abs() < 1e-15);
        assert_eq!(ev.total, ev.per_obs.iter().sum::<f64>());
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(gaussian_loglik(0.0, &[1.0], 0.0).is_err());
        assert!(gaussian_loglik(0.0, &[1.0], -1.0).is_err());
        assert!(GaussianMean::new(&[], 1.0).is_err());
    }
}
