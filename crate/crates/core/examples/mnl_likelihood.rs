//! Simulate a multinomial-logit sample and evaluate its log-likelihood,
//! choice probabilities and per-observation scores.

use twostep_mle::autodiff::score_matrix;
use twostep_mle::models::{mnl_loglik, mnl_probabilities, param_count, simulate_dataset, Mnl};

fn main() -> twostep_mle::Result<()> {
    let (alternatives, covariates) = (4, 3);
    let p = param_count(alternatives, covariates)?;
    let theta: Vec<f64> = (0..p).map(|k| 0.3 * ((k as f64) - 5.5).sin()).collect();
    let data = simulate_dataset(alternatives, covariates, 1_000, &theta, 7)?;

    println!("observations: {}, parameters: {p}", data.n_obs());
    println!("choice shares: {:?}", data.shares());
    println!("probabilities for row 0: {:?}", mnl_probabilities(&theta, data.row(0), alternatives)?);

    let eval = mnl_loglik(&theta, &data)?;
    println!("log-likelihood at the truth: {:.4}", eval.total);

    let scores = score_matrix(&Mnl::new(&data), &theta).map_err(twostep_mle::Error::from)?;
    let sums = scores.column_sums();
    println!("score column sums: {:?}", sums);
    Ok(())
}
