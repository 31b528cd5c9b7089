use nalgebra::{DMatrix, DVector};

use twostep_mle::autodiff::{hessian, score_matrix, HessianMatrix, Real, ScoreMatrix};
use twostep_mle::covariance::{
    cov_from_hessian, cov_from_opg, cov_sandwich, invert_spd, standard_errors, CovarianceMatrix,
};
use twostep_mle::models::{mnl_probabilities, simulate_dataset, ChoiceDataset, GaussianMean, Mnl};
use twostep_mle::objective::{Likelihood, NegLogLik, TotalLogLik};
use twostep_mle::optimize::{bfgs, gradient_fn, objective_fn, random_init, BfgsOptions};
use twostep_mle::{seed, EvalError};

fn fitted(alternatives: usize, covariates: usize, n: usize, data_seed: u64) -> (ChoiceDataset, Vec<f64>) {
    let p = (alternatives - 1) * (covariates + 1);
    let theta: Vec<f64> = random_init(p, data_seed).unwrap().iter().map(|v| 0.5 * v).collect();
    let data = simulate_dataset(alternatives, covariates, n, &theta, data_seed + 1).unwrap();
    let theta_hat = {
        let model = Mnl::new(&data);
        let neg = NegLogLik(&model);
        let r = bfgs(objective_fn(&neg), gradient_fn(&neg), &theta, &BfgsOptions::default()).unwrap();
        assert!(r.converged);
        r.theta_hat
    };
    (data, theta_hat)
}

fn derivatives<L: Likelihood>(model: &L, theta: &[f64]) -> (HessianMatrix, ScoreMatrix) {
    (hessian(&TotalLogLik(model), theta).unwrap(), score_matrix(model, theta).unwrap())
}

fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Expected information of the MNL with case-specific covariates:
/// block `(j, l)` is `Σᵢ (δⱼₗ Pᵢⱼ − Pᵢⱼ Pᵢₗ) x̃ᵢ x̃ᵢᵀ` with `x̃ = (1, x)`.
fn textbook_information(data: &ChoiceDataset, theta: &[f64]) -> DMatrix<f64> {
    let (alts, stride) = (data.alternatives(), data.covariates() + 1);
    let p = (alts - 1) * stride;
    let mut info = DMatrix::zeros(p, p);
    for i in 0..data.n_obs() {
        let probs = mnl_probabilities(theta, data.row(i), alts).unwrap();
        let mut xt = vec![1.0];
        xt.extend_from_slice(data.row(i));
        for j in 1..alts {
            for l in 1..alts {
                let w = if j == l { probs[j] - probs[j] * probs[l] } else { -probs[j] * probs[l] };
                for a in 0..stride {
                    for b in 0..stride {
                        info[((j - 1) * stride + a, (l - 1) * stride + b)] += w * xt[a] * xt[b];
                    }
                }
            }
        }
    }
    info
}

#[test]
fn inverse_residuals_are_small() {
    for k in 0..100 {
        let vals = random_init(36, seed::derive(31, k)).unwrap();
        let b = DMatrix::from_column_slice(6, 6, &vals);
        let a = b.transpose() * &b + DMatrix::identity(6, 6);
        let inv = invert_spd(&a).unwrap();
        assert_eq!(inv.ridge, 0.0);
        let residual = (&a * &inv.inverse - DMatrix::<f64>::identity(6, 6)).abs().max();
        assert!(residual < 1e-8, "residual {residual}");
    }
}

#[test]
fn hessian_standard_errors_match_textbook_formula() {
    let (data, theta_hat) = fitted(4, 3, 500, 32);
    let (h, _) = derivatives(&Mnl::new(&data), &theta_hat);
    let se = standard_errors(&cov_from_hessian(&h).unwrap()).unwrap();
    let oracle = textbook_information(&data, &theta_hat).cholesky().unwrap().inverse();
    for k in 0..12 {
        let expected = oracle[(k, k)].sqrt();
        assert!((se.as_slice()[k] - expected).abs() < 1e-6 * expected);
    }
}

#[test]
fn opg_and_hessian_covariances_agree_at_large_n() {
    let (data, theta_hat) = fitted(3, 2, 20_000, 33);
    let (h, g) = derivatives(&Mnl::new(&data), &theta_hat);
    let c_h = cov_from_hessian(&h).unwrap();
    let c_g = cov_from_opg(&g).unwrap();
    assert!(rel_frobenius(c_g.matrix(), c_h.matrix()) < 0.15);
}

#[test]
fn sandwich_matches_robust_variance_of_the_mean() {
    // Heteroskedastic draws fitted with a misspecified constant sigma.
    let noise = random_init(500, 34).unwrap();
    let data: Vec<f64> = noise
        .iter()
        .enumerate()
        .map(|(i, z)| 1.0 + z * (0.5 + 2.0 * (i % 5) as f64))
        .collect();
    let n = data.len() as f64;
    let mu_hat = data.iter().sum::<f64>() / n;
    let model = GaussianMean::new(&data, 1.0).unwrap();
    let (h, g) = derivatives(&model, &[mu_hat]);
    let se = standard_errors(&cov_sandwich(&h, &g).unwrap()).unwrap();
    let robust = (data.iter().map(|x| (x - mu_hat).powi(2)).sum::<f64>() / (n * n)).sqrt();
    assert!((se.as_slice()[0] - robust).abs() < 1e-8);
}

#[test]
fn estimators_are_symmetric_and_positive_definite_at_the_optimum() {
    let (data, theta_hat) = fitted(4, 2, 400, 35);
    let (h, g) = derivatives(&Mnl::new(&data), &theta_hat);
    let all: [CovarianceMatrix; 3] = [
        cov_from_hessian(&h).unwrap(),
        cov_from_opg(&g).unwrap(),
        cov_sandwich(&h, &g).unwrap(),
    ];
    for c in &all {
        let m = c.matrix();
        assert_eq!(m, &m.transpose());
        assert!(m.clone().cholesky().is_some(), "{} is not positive definite", c.method());
        assert!(!c.jittered());
    }
}

/// The MNL in rescaled coordinates: `θ = D φ`.
struct Rescaled<'a> {
    inner: Mnl<'a>,
    scale: Vec<f64>,
}

impl Likelihood for Rescaled<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn n_obs(&self) -> usize {
        self.inner.n_obs()
    }

    fn obs_loglik<S: Real>(&self, phi: &[S], i: usize) -> Result<S, EvalError> {
        let theta: Vec<S> = phi.iter().zip(&self.scale).map(|(v, d)| v.clone() * *d).collect();
        self.inner.obs_loglik(&theta, i)
    }
}

#[test]
fn covariances_transform_with_the_parameterization() {
    let (data, theta_hat) = fitted(3, 1, 300, 36);
    let scale = vec![2.0, 0.5, 4.0, 1.0];
    let d_inv = DMatrix::from_diagonal(&DVector::from_iterator(4, scale.iter().map(|d| 1.0 / d)));
    let phi_hat: Vec<f64> = theta_hat.iter().zip(&scale).map(|(t, d)| t / d).collect();
    let base = Mnl::new(&data);
    let rescaled = Rescaled {
        inner: Mnl::new(&data),
        scale: scale.clone(),
    };
    let (h, g) = derivatives(&base, &theta_hat);
    let (h2, g2) = derivatives(&rescaled, &phi_hat);
    let pairs = [
        (cov_from_hessian(&h).unwrap(), cov_from_hessian(&h2).unwrap()),
        (cov_from_opg(&g).unwrap(), cov_from_opg(&g2).unwrap()),
        (cov_sandwich(&h, &g).unwrap(), cov_sandwich(&h2, &g2).unwrap()),
    ];
    for (c, c2) in pairs {
        let expected = &d_inv * c.matrix() * &d_inv;
        assert!(rel_frobenius(c2.matrix(), &expected) < 1e-10, "{}", c.method());
    }
}

#[test]
fn gaussian_standard_error_scales_with_data_units() {
    let data = random_init(100, 37).unwrap();
    let doubled: Vec<f64> = data.iter().map(|v| 2.0 * v).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let se_of = |v: &[f64], sigma: f64| {
        let model = GaussianMean::new(v, sigma).unwrap();
        let (h, g) = derivatives(&model, &[mean(v)]);
        (
            standard_errors(&cov_from_hessian(&h).unwrap()).unwrap().as_slice()[0],
            standard_errors(&cov_from_opg(&g).unwrap()).unwrap().as_slice()[0],
        )
    };
    let (h1, g1) = se_of(&data, 1.5);
    let (h2, g2) = se_of(&doubled, 3.0);
    assert!((h2 - 2.0 * h1).abs() < 1e-12);
    assert!((g2 - 2.0 * g1).abs() < 1e-12);
    assert!((h1 - 0.15).abs() < 1e-12);
}
