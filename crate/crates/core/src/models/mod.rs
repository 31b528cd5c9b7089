//! Likelihood models: the multinomial logit with case-specific covariates,
//! a known-variance Gaussian mean model, and a synthetic choice-data
//! generator.

mod dataset;
mod gaussian;
mod mnl;

pub use dataset::ChoiceDataset;
pub use gaussian::{gaussian_loglik, GaussianMean};
pub use mnl::{mnl_loglik, mnl_probabilities, param_count, parameter_names, simulate_dataset, Mnl};

/// A log-likelihood value together with its per-observation terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLikEvaluation {
    pub total: f64,
    pub per_obs: Vec<f64>,
}

impl LogLikEvaluation {
    pub fn from_terms(per_obs: Vec<f64>) -> Self {
        LogLikEvaluation {
            total: per_obs.iter().sum(),
            per_obs,
        }
    }
}
