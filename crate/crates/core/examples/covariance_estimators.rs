//! Hessian, outer-product and sandwich standard errors at the maximum of
//! a simulated multinomial logit.

use twostep_mle::autodiff::{hessian, score_matrix};
use twostep_mle::covariance::{cov_from_hessian, cov_from_opg, cov_sandwich, standard_errors};
use twostep_mle::models::{simulate_dataset, Mnl};
use twostep_mle::objective::{NegLogLik, TotalLogLik};
use twostep_mle::optimize::{bfgs, gradient_fn, objective_fn, BfgsOptions};
use twostep_mle::Error;

fn main() -> twostep_mle::Result<()> {
    let theta = [0.4, -0.7, 0.2, -0.3, 0.8, 0.1];
    let data = simulate_dataset(3, 2, 5_000, &theta, 11)?;
    let model = Mnl::new(&data);
    let neg = NegLogLik(&model);
    let fit = bfgs(objective_fn(&neg), gradient_fn(&neg), &[0.0; 6], &BfgsOptions::default())?;

    let h = hessian(&TotalLogLik(&model), &fit.theta_hat).map_err(Error::from)?;
    let g = score_matrix(&model, &fit.theta_hat).map_err(Error::from)?;
    let estimates = [cov_from_hessian(&h)?, cov_from_opg(&g)?, cov_sandwich(&h, &g)?];

    println!("theta_hat: {:?}", fit.theta_hat);
    for c in &estimates {
        let se = standard_errors(c)?;
        println!("{:>9}: {:?}", c.method().as_str(), se.as_slice());
    }
    Ok(())
}
