//! The full fit pipeline driven by a config: simulate, anneal, then
//! differentiate at the annealed optimum.

use twostep_mle::cli::{run_fit, RunConfig, TWO_STEP};

fn main() -> twostep_mle::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.simulation.n = 1_000;
    let report = run_fit(&cfg)?;
    let arm = report.arm(TWO_STEP).expect("fit always reports its arm");

    println!("optimizer: {}", arm.optimizer);
    println!("log-likelihood: {:?}", arm.loglik);
    for (k, name) in report.parameter_names.iter().enumerate() {
        let theta = arm.theta_hat.as_ref().map(|t| t[k]).unwrap_or(f64::NAN);
        let se = arm.standard_errors.get("hessian").map(|s| s[k]).unwrap_or(f64::NAN);
        println!("{name:>20} {theta:>9.4} ({se:.4})");
    }
    Ok(())
}
