//! Simulated annealing on the multimodal Rastrigin function, next to a
//! single BFGS run that stalls in a local well.

use std::f64::consts::PI;

use twostep_mle::optimize::{bfgs, simulated_annealing, AnnealingSchedule, BfgsOptions, Bounds};

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

fn rastrigin_grad(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin()).collect()
}

fn main() -> twostep_mle::Result<()> {
    let init = [3.7, -2.2, 4.1, 1.4];
    let bounds = Bounds::uniform(4, -20.0, 20.0)?;

    let local = bfgs(rastrigin, rastrigin_grad, &init, &BfgsOptions::default())?;
    println!("bfgs:      f = {:.4} at {:?}", local.objective, local.theta_hat);

    for seed in 1..=3 {
        let r = simulated_annealing(rastrigin, &bounds, &AnnealingSchedule::with_seed(seed), &init)?;
        println!(
            "annealing: f = {:.2e} after {} evaluations (seed {seed}, converged {})",
            r.objective, r.evaluations, r.converged
        );
    }
    Ok(())
}
