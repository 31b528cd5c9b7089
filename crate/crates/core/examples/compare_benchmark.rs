//! Two-step standard errors against the gradient-based and bootstrap
//! baselines, with distances and permutation tests between them.

use twostep_mle::cli::{run_compare, Command, OptimizerKind, RunConfig};

fn main() -> twostep_mle::Result<()> {
    let mut cfg = RunConfig {
        command: Command::Compare,
        optimizer: OptimizerKind::Bfgs,
        bootstrap_b: 100,
        perm_iters: 20_000,
        ..Default::default()
    };
    cfg.simulation.n = 400;
    let report = run_compare(&cfg)?;

    for arm in &report.arms {
        println!("{:<9} {:<10} failure: {:?}", arm.name, arm.optimizer, arm.failure);
    }
    for (d, t) in report.distances.iter().zip(&report.permutation_tests) {
        println!(
            "{:>18} vs {:<18} distance {:.3e}  greater {:.3}  lower {:.3}",
            d.a, d.b, d.distance, t.test.fraction_greater, t.test.fraction_lower
        );
    }
    Ok(())
}
