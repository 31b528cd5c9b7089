use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Bounds, OptimizationResult};
use crate::error::{Error, Result};
use crate::seed;

/// Cooling schedule for [`simulated_annealing`].
///
/// `initial_temp = None` starts at `10·|f(init)|` (at least 1);
/// `steps_per_temp = None` uses `50·p` proposals per temperature level.
/// The proposal standard deviation on coordinate `i` is
/// `step_scale · (upper_i − lower_i) · sqrt(T / T0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct AnnealingSchedule {
    pub initial_temp: Option<f64>,
    pub cooling: f64,
    pub steps_per_temp: Option<usize>,
    pub min_temp: f64,
    pub max_evals: usize,
    pub step_scale: f64,
    pub seed: u64,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        AnnealingSchedule {
            initial_temp: None,
            cooling: 0.95,
            steps_per_temp: None,
            min_temp: 1e-8,
            max_evals: 2_000_000,
            step_scale: 1.0,
            seed: 0,
        }
    }
}

impl AnnealingSchedule {
    pub fn with_seed(seed: u64) -> Self {
        AnnealingSchedule {
            seed,
            ..Default::default()
        }
    }
}

/// Metropolis rule: downhill always, uphill with probability `exp(−Δ/T)`.
/// `u` is a uniform draw on `[0, 1)`.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    delta <= 0.0 || u < (-delta / temperature).exp()
}

/// Levels whose closing objective must agree before declaring convergence.
const STABLE_LEVELS: usize = 3;
const STABLE_TOL: f64 = 1e-10;

pub fn simulated_annealing<F>(
    objective: F,
    bounds: &Bounds,
    schedule: &AnnealingSchedule,
    init: &[f64],
) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64,
{
    simulated_annealing_observed(objective, bounds, schedule, init, |_, _| {})
}

/// Classic Metropolis annealing with geometric cooling and mirror reflection
/// at the bounds. Each proposal moves one coordinate, cycling through them
/// in order, by a Gaussian step. `observer` sees every accepted
/// iterate (including the starting point).
///
/// Converges when the objective at the end of the last
/// three temperature levels agrees within `1e-10` (relative, floored at 1)
/// with each other and with the best value, or when the temperature drops
/// below `min_temp`. Running out of `max_evals` leaves `converged = false`.
pub fn simulated_annealing_observed<F, O>(
    objective: F,
    bounds: &Bounds,
    schedule: &AnnealingSchedule,
    init: &[f64],
    mut observer: O,
) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64,
    O: FnMut(&[f64], f64),
{
    let p = init.len();
    if bounds.dim() != p {
        return Err(Error::Argument(format!(
            "bounds have dimension {}, start has {p}",
            bounds.dim()
        )));
    }
    if !(schedule.cooling > 0.0 && schedule.cooling < 1.0) {
        return Err(Error::Argument(format!("cooling must lie in (0, 1), got {}", schedule.cooling)));
    }
    if !(schedule.min_temp > 0.0) || !(schedule.step_scale > 0.0) {
        return Err(Error::Argument("min_temp and step_scale must be positive".into()));
    }
    let steps = schedule.steps_per_temp.unwrap_or(50 * p);
    if steps == 0 {
        return Err(Error::Argument("steps_per_temp must be at least 1".into()));
    }

    let mut current = init.to_vec();
    let clipped = bounds.clip(&mut current);
    let mut f_current = objective(&current);
    if !f_current.is_finite() {
        return Err(Error::Optimizer(format!(
            "objective is not finite at the starting point ({f_current})"
        )));
    }
    let t0 = schedule
        .initial_temp
        .unwrap_or_else(|| (10.0 * f_current.abs()).max(1.0));
    if !(t0 > schedule.min_temp) {
        return Err(Error::Argument(format!(
            "initial temperature {t0} must exceed min_temp {}",
            schedule.min_temp
        )));
    }

    let mut rng = seed::rng(schedule.seed);
    let mut evals = 1usize;
    let mut rejected = 0usize;
    let mut best = current.clone();
    let mut f_best = f_current;
    let mut trace = vec![(evals, f_best)];
    observer(&current, f_current);

    let widths: Vec<f64> = (0..p).map(|i| bounds.upper()[i] - bounds.lower()[i]).collect();
    let mut candidate = vec![0.0; p];
    let mut level_ends: Vec<f64> = Vec::new();
    let mut temp = t0;
    let mut converged = false;
    let mut message = String::new();

    'levels: while evals < schedule.max_evals {
        if temp < schedule.min_temp {
            converged = true;
            message = "minimum temperature reached".into();
            break;
        }
        let scale = schedule.step_scale * (temp / t0).sqrt();
        for step in 0..steps {
            if evals >= schedule.max_evals {
                break 'levels;
            }
            let i = step % p;
            let z: f64 = rng.sample(StandardNormal);
            candidate.copy_from_slice(&current);
            candidate[i] = bounds.reflect(i, current[i] + scale * widths[i] * z);
            let f_candidate = objective(&candidate);
            evals += 1;
            let u: f64 = rng.gen();
            if !f_candidate.is_finite() {
                rejected += 1;
                continue;
            }
            if metropolis_accept(f_candidate - f_current, temp, u) {
                current.copy_from_slice(&candidate);
                f_current = f_candidate;
                observer(&current, f_current);
                if f_current < f_best {
                    f_best = f_current;
                    best.copy_from_slice(&current);
                    trace.push((evals, f_best));
                }
            }
        }
        level_ends.push(f_current);
        if level_ends.len() > STABLE_LEVELS {
            let tol = STABLE_TOL * f_best.abs().max(1.0);
            let recent = &level_ends[level_ends.len() - STABLE_LEVELS - 1..];
            let stable = recent.windows(2).all(|w| (w[1] - w[0]).abs() <= tol);
            if stable && f_current - f_best <= tol {
                converged = true;
                message = format!("objective stable over {STABLE_LEVELS} temperature levels");
                break;
            }
        }
        temp *= schedule.cooling;
    }
    if !converged {
        message = format!("evaluation budget of {} exhausted", schedule.max_evals);
    }
    if clipped {
        message.push_str("; starting point clipped into bounds");
    }
    Ok(OptimizationResult {
        theta_hat: best,
        objective: f_best,
        evaluations: evals,
        converged,
        best_trace: trace,
        rejected,
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_rule() {
        assert!(metropolis_accept(0.0, 1.0, 0.999));
        assert!(metropolis_accept(-5.0, 1e-12, 0.999));
        // exp(-1) ≈ 0.3679
        assert!(metropolis_accept(1.0, 1.0, 0.36));
        assert!(!metropolis_accept(1.0, 1.0, 0.37));
        assert!(!metropolis_accept(1e3, 1.0, 0.0));
    }

    #[test]
    fn schedule_validation() {
        let b = Bounds::uniform(1, -1.0, 1.0).unwrap();
        let f = |x: &[f64]| x[0] * x[0];
        let bad = AnnealingSchedule {
            cooling: 1.0,
            ..Default::default()
        };
        assert!(simulated_annealing(f, &b, &bad, &[0.5]).is_err());
        let bad = AnnealingSchedule {
            steps_per_temp: Some(0),
            ..Default::default()
        };
        assert!(simulated_annealing(f, &b, &bad, &[0.5]).is_err());
        let bad = AnnealingSchedule {
            initial_temp: Some(1e-9),
            ..Default::default()
        };
        assert!(simulated_annealing(f, &b, &bad, &[0.5]).is_err());
        assert!(simulated_annealing(f, &b, &Default::default(), &[0.5, 1.0]).is_err());
    }

    #[test]
    fn non_finite_start_is_an_error_and_candidates_are_counted() {
        let b = Bounds::uniform(1, -2.0, 2.0).unwrap();
        let f = |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { x[0] * x[0] };
        assert!(matches!(
            simulated_annealing(f, &b, &Default::default(), &[1.0]),
            Err(Error::Optimizer(_))
        ));
        let r = simulated_annealing(f, &b, &AnnealingSchedule::with_seed(3), &[-1.0]).unwrap();
        assert!(r.rejected > 0);
        assert!(r.theta_hat[0] <= 0.0 && r.theta_hat[0] > -1e-3);
    }

    #[test]
    fn start_outside_bounds_is_clipped() {
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let mut first = None;
        let r = simulated_annealing_observed(
            |x: &[f64]| x.iter().map(|v| v * v).sum(),
            &b,
            &AnnealingSchedule::with_seed(1),
            &[5.0, -0.5],
            |x, _| {
                if first.is_none() {
                    first = Some(x.to_vec());
                }
            },
        )
        .unwrap();
        assert_eq!(first.unwrap(), vec![1.0, -0.5]);
        assert!(r.message.contains("clipped"));
    }

    #[test]
    fn budget_exhaustion_is_not_convergence() {
        let b = Bounds::uniform(2, -5.0, 5.0).unwrap();
        let s = AnnealingSchedule {
            max_evals: 500,
            ..AnnealingSchedule::with_seed(2)
        };
        let r = simulated_annealing(|x: &[f64]| x[0].abs() + x[1].abs(), &b, &s, &[1.0, 1.0]).unwrap();
        assert!(!r.converged);
        assert_eq!(r.evaluations, 500);
    }
}
