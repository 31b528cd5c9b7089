use proptest::prelude::*;

use twostep_mle::autodiff::hessian;
use twostep_mle::models::{
    gaussian_loglik, mnl_loglik, mnl_probabilities, simulate_dataset, ChoiceDataset, Mnl,
};
use twostep_mle::objective::TotalLogLik;
use twostep_mle::optimize::random_init;

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn probabilities_are_a_distribution(
        theta in prop::collection::vec(-20.0..20.0f64, 12),
        x in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let p = mnl_probabilities(&theta, &x, 4).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|v| *v > 0.0));
    }
}

proptest! {
    #[test]
    fn common_utility_shift_leaves_probabilities_unchanged(
        theta in prop::collection::vec(-3.0..3.0f64, 6),
        x in prop::collection::vec(-2.0..2.0f64, 2),
        shift in -50.0..50.0f64,
    ) {
        // Softmax over explicit utilities with an arbitrary common offset;
        // only the free coefficients of alternatives 2 and 3 enter.
        let mut u = vec![shift];
        for j in 0..2 {
            let c = &theta[j * 3..(j + 1) * 3];
            u.push(shift + c[0] + c[1] * x[0] + c[2] * x[1]);
        }
        let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = u.iter().map(|v| (v - m).exp()).collect();
        let total: f64 = w.iter().sum();
        let p = mnl_probabilities(&theta, &x, 3).unwrap();
        for j in 0..3 {
            prop_assert!((p[j] - w[j] / total).abs() < 1e-12);
        }
    }
}

#[test]
fn binary_case_reduces_to_logit() {
    let theta = [0.7, -1.3, 0.4];
    for x in [[0.0, 0.0], [1.5, -0.2], [-3.0, 2.0]] {
        let p = mnl_probabilities(&theta, &x, 2).unwrap();
        let expected = logistic(theta[0] + theta[1] * x[0] + theta[2] * x[1]);
        assert!((p[1] - expected).abs() < 1e-12);
    }

    let data = simulate_dataset(2, 2, 400, &theta, 3).unwrap();
    let oracle: f64 = (0..data.n_obs())
        .map(|i| {
            let x = data.row(i);
            let q = logistic(theta[0] + theta[1] * x[0] + theta[2] * x[1]);
            if data.chosen()[i] == 2 { q.ln() } else { (1.0 - q).ln() }
        })
        .sum();
    let eval = mnl_loglik(&theta, &data).unwrap();
    assert!((eval.total - oracle).abs() < 1e-10);
    assert_eq!(eval.per_obs.len(), 400);
}

#[test]
fn zero_coefficients_give_equal_shares() {
    let data = simulate_dataset(4, 2, 100_000, &[0.0; 9], 5).unwrap();
    for share in data.shares() {
        assert!((share - 0.25).abs() < 0.01, "share {share}");
    }
}

#[test]
fn log_likelihood_is_concave() {
    let theta_true: Vec<f64> = random_init(9, 6).unwrap().iter().map(|v| 0.5 * v).collect();
    let data = simulate_dataset(4, 2, 300, &theta_true, 7).unwrap();
    let total = TotalLogLik(&Mnl::new(&data));
    for k in 0..50 {
        let theta: Vec<f64> = random_init(9, 100 + k).unwrap().iter().map(|v| 2.0 * v).collect();
        let h = hessian(&total, &theta).unwrap();
        let largest = h.matrix().clone().symmetric_eigen().eigenvalues.max();
        assert!(largest <= 1e-8, "eigenvalue {largest} at draw {k}");
    }
}

#[test]
fn gaussian_log_likelihood_closed_form() {
    let data = [1.0, 2.5, -0.5, 4.0];
    let (mu, sigma) = (1.2, 1.5);
    let eval = gaussian_loglik(mu, &data, sigma).unwrap();
    let n = data.len() as f64;
    let rss: f64 = data.iter().map(|x| (x - mu) * (x - mu)).sum();
    let expected = -0.5 * n * (2.0 * std::f64::consts::PI * sigma * sigma).ln() - rss / (2.0 * sigma * sigma);
    assert!((eval.total - expected).abs() < 1e-12);
    assert!(gaussian_loglik(mu, &data, 0.0).is_err());
    assert!(gaussian_loglik(mu, &[], 1.0).is_err());
}

#[test]
fn datasets_reject_bad_input() {
    assert!(ChoiceDataset::new(1, 1, vec![0.0], vec![1]).is_err());
    assert!(ChoiceDataset::new(3, 1, vec![0.0], vec![4]).is_err());
    assert!(ChoiceDataset::new(3, 1, vec![f64::NAN], vec![1]).is_err());
    assert!(ChoiceDataset::new(3, 2, vec![0.0], vec![1]).is_err());
    let data = ChoiceDataset::new(3, 1, vec![0.5, -1.0], vec![1, 3]).unwrap();
    assert_eq!(data.select(&[1, 1, 0]).chosen(), &[3, 3, 1]);
}

#[test]
fn random_init_is_standard_normal() {
    let draws = random_init(100_000, 8).unwrap();
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let sd = (draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 0.02);
    assert!((sd - 1.0).abs() < 0.02);
    assert_eq!(draws, random_init(100_000, 8).unwrap());
    assert!(random_init(0, 8).is_err());
}
