use rayon::prelude::*;

use super::{random_init, OptimizationResult};
use crate::error::{Error, Result};
use crate::seed;

/// Runs `optimizer` from `starts` standard-normal starting points and keeps
/// the lowest objective (ties go to the earlier start).
///
/// Start `i` uses `random_init(dim, derive(seed, i))`, so the winner does
/// not depend on how runs are scheduled across threads. The returned
/// `best_trace` and `evaluations` span all runs in start order.
pub fn multistart<F>(dim: usize, starts: usize, seed: u64, optimizer: F) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> Result<OptimizationResult> + Sync,
{
    if starts < 1 {
        return Err(Error::Argument("need at least one start".into()));
    }
    let runs: Vec<Result<OptimizationResult>> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let init = random_init(dim, seed::derive(seed, i as u64))?;
            optimizer(&init)
        })
        .collect();

    let mut winner: Option<OptimizationResult> = None;
    let mut trace = Vec::new();
    let mut evals = 0usize;
    let mut best = f64::INFINITY;
    let mut last_error = String::new();
    for run in runs {
        match run {
            Ok(r) if r.objective.is_finite() => {
                for &(e, f) in &r.best_trace {
                    if f < best {
                        best = f;
                        trace.push((evals + e, f));
                    }
                }
                evals += r.evaluations;
                if winner.as_ref().map_or(true, |w| r.objective < w.objective) {
                    winner = Some(r);
                }
            }
            Ok(r) => last_error = format!("non-finite objective {}", r.objective),
            Err(e) => last_error = e.to_string(),
        }
    }
    let mut winner = winner.ok_or(Error::AllFailed {
        attempts: starts,
        last: last_error,
    })?;
    if starts > 1 {
        winner.best_trace = trace;
        winner.evaluations = evals;
    }
    Ok(winner)
}
