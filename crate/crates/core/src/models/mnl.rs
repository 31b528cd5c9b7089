use rand::Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;

use super::{ChoiceDataset, LogLikEvaluation};
use crate::autodiff::Real;
use crate::error::{Error, EvalError, Result};
use crate::objective::Likelihood;
use crate::seed;

/// Number of free coefficients, `(J − 1)(K + 1)`.
pub fn param_count(alternatives: usize, covariates: usize) -> Result<usize> {
    if alternatives < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 alternatives, got {alternatives}"
        )));
    }
    Ok((alternatives - 1) * (covariates + 1))
}

/// Coefficient names in parameter order: alternative-major, intercept first.
pub fn parameter_names(labels: &[String], covariate_names: &[String]) -> Vec<String> {
    labels
        .iter()
        .skip(1)
        .flat_map(|alt| {
            std::iter::once(format!("{alt}:intercept"))
                .chain(covariate_names.iter().map(move |c| format!("{alt}:{c}")))
        })
        .collect()
}

type Utilities<S> = SmallVec<[S; 8]>;

fn utilities<S: Real>(theta: &[S], x: &[f64], alternatives: usize) -> Utilities<S> {
    let stride = x.len() + 1;
    let mut u = Utilities::with_capacity(alternatives);
    u.push(S::constant(0.0));
    for j in 0..alternatives - 1 {
        let coef = &theta[j * stride..(j + 1) * stride];
        let mut v = coef[0].clone();
        for (b, &xk) in coef[1..].iter().zip(x) {
            v = v + b.clone() * xk;
        }
        u.push(v);
    }
    u
}

/// `log Σⱼ exp(uⱼ)`, shifted by the largest utility.
fn log_sum_exp<S: Real>(u: &[S]) -> Result<S, EvalError> {
    let shift = u.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.value()));
    let sum: S = u.iter().map(|v| (v.clone() - shift).exp()).sum();
    Ok(sum.ln()? + shift)
}

fn check_layout(len: usize, alternatives: usize, covariates: usize) -> Result<(), EvalError> {
    let expected = (alternatives - 1) * (covariates + 1);
    if len != expected {
        return Err(EvalError::Dimension { expected, got: len });
    }
    Ok(())
}

/// Choice probabilities for one covariate row.
///
/// Alternative 1 has utility zero; alternative `j ≥ 2` has utility
/// `θ[j,0] + Σₖ θ[j,k] xₖ`. Computed as a max-shifted softmax.
pub fn mnl_probabilities<S: Real>(theta: &[S], x: &[f64], alternatives: usize) -> Result<Vec<S>> {
    let expected = param_count(alternatives, x.len())?;
    if theta.len() != expected {
        return Err(EvalError::Dimension {
            expected,
            got: theta.len(),
        }
        .into());
    }
    let u = utilities(theta, x, alternatives);
    let shift = u.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.value()));
    let weights: Utilities<S> = u.into_iter().map(|v| (v - shift).exp()).collect();
    let total: S = weights.iter().cloned().sum();
    Ok(weights.into_iter().map(|w| w / total.clone()).collect())
}

/// Multinomial logit log-likelihood over a [`ChoiceDataset`].
#[derive(Debug, Clone, Copy)]
pub struct Mnl<'a> {
    data: &'a ChoiceDataset,
}

impl<'a> Mnl<'a> {
    pub fn new(data: &'a ChoiceDataset) -> Self {
        Mnl { data }
    }

    pub fn data(&self) -> &ChoiceDataset {
        self.data
    }
}

impl Likelihood for Mnl<'_> {
    fn dim(&self) -> usize {
        (self.data.alternatives() - 1) * (self.data.covariates() + 1)
    }

    fn n_obs(&self) -> usize {
        self.data.n_obs()
    }

    fn obs_loglik<S: Real>(&self, theta: &[S], i: usize) -> Result<S, EvalError> {
        let d = self.data;
        check_layout(theta.len(), d.alternatives(), d.covariates())?;
        let u = utilities(theta, d.row(i), d.alternatives());
        let lse = log_sum_exp(&u)?;
        Ok(u[d.chosen()[i] - 1].clone() - lse)
    }
}

/// Evaluates the MNL log-likelihood with its per-observation terms.
pub fn mnl_loglik(theta: &[f64], data: &ChoiceDataset) -> Result<LogLikEvaluation> {
    let model = Mnl::new(data);
    check_layout(theta.len(), data.alternatives(), data.covariates())?;
    if let Some(v) = theta.iter().find(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite(*v).into());
    }
    let per_obs = (0..data.n_obs())
        .map(|i| model.obs_loglik(theta, i).map_err(|e| e.at_observation(i)))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(LogLikEvaluation::from_terms(per_obs))
}

/// Draws `n` observations: covariates i.i.d. standard normal, choices
/// sampled from the model probabilities at `theta_true`.
pub fn simulate_dataset(
    alternatives: usize,
    covariates: usize,
    n: usize,
    theta_true: &[f64],
    seed: u64,
) -> Result<ChoiceDataset> {
    let p = param_count(alternatives, covariates)?;
    if theta_true.len() != p {
        return Err(EvalError::Dimension {
            expected: p,
            got: theta_true.len(),
        }
        .into());
    }
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let mut rng = seed::rng(seed);
    let mut x = Vec::with_capacity(n * covariates);
    let mut chosen = Vec::with_capacity(n);
    for _ in 0..n {
        let start = x.len();
        x.extend((0..covariates).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let probs = mnl_probabilities(theta_true, &x[start..], alternatives)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = alternatives;
        for (j, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = j + 1;
                break;
            }
        }
        chosen.push(pick);
    }
    ChoiceDataset::new(alternatives, covariates, x, chosen)
}
