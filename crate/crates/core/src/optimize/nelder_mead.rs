use serde::{Deserialize, Serialize};

use super::OptimizationResult;
use crate::error::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Simplex diameter tolerance, relative to `max(1, ‖x_best‖∞)`.
    pub x_tol: f64,
    /// Objective spread tolerance, relative to `max(1, |f_best|)`.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evals: 100_000,
            x_tol: 1e-10,
            f_tol: 1e-14,
        }
    }
}

/// Derivative-free simplex search with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½).
pub fn nelder_mead<F>(objective: F, init: &[f64], opts: &NelderMeadOptions) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64,
{
    let p = init.len();
    if p == 0 {
        return Err(Error::Argument("dimension must be at least 1".into()));
    }
    let f = |x: &[f64]| {
        let v = objective(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let f0 = f(init);
    if !f0.is_finite() {
        return Err(Error::Optimizer(format!(
            "objective is not finite at the starting point ({f0})"
        )));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(init.to_vec(), f0)];
    for i in 0..p {
        let mut v = init.to_vec();
        v[i] += if v[i] != 0.0 { 0.05 * v[i] } else { 0.00025 };
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let mut evals = p + 1;
    let mut rejected = 0;
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut converged = false;

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best {
            best = simplex[0].1;
            trace.push((evals, best));
        }
        let (xb, fb) = (&simplex[0].0, simplex[0].1);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(xb).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = simplex[p].1 - fb;
        let xscale = xb.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if diameter <= opts.x_tol * xscale && spread <= opts.f_tol * fb.abs().max(1.0) {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; p];
        for (v, _) in &simplex[..p] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / p as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[p].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(REFLECT);
        let fr = f(&xr);
        evals += 1;
        rejected += usize::from(!fr.is_finite());
        if fr < simplex[0].1 {
            let xe = along(EXPAND);
            let fe = f(&xe);
            evals += 1;
            simplex[p] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[p - 1].1 {
            simplex[p] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[p].1 {
            let xc = along(CONTRACT * REFLECT);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < fr.min(simplex[p].1) {
            simplex[p] = (xc, fc);
            continue;
        }
        let x0 = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (x, b) in v.iter_mut().zip(&x0) {
                *x = b + SHRINK * (*x - b);
            }
            *fv = f(v);
            evals += 1;
        }
    }
    let (theta_hat, objective_value) = simplex.swap_remove(0);
    Ok(OptimizationResult {
        theta_hat,
        objective: objective_value,
        evaluations: evals,
        converged,
        best_trace: trace,
        rejected,
        message: if converged {
            "simplex collapsed below tolerance".into()
        } else {
            format!("evaluation budget of {} exhausted", opts.max_evals)
        },
    })
}
