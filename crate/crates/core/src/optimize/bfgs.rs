use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::OptimizationResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct BfgsOptions {
    /// Stop once `‖∇f‖∞` falls below this.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    pub max_line_evals: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            grad_tol: 1e-8,
            max_iter: 1000,
            c1: 1e-4,
            c2: 0.9,
            max_line_evals: 60,
        }
    }
}

struct Point {
    alpha: f64,
    f: f64,
    g: DVector<f64>,
    slope: f64,
}

struct LineSearch<'a, F, G> {
    objective: &'a F,
    gradient: &'a G,
    x: &'a DVector<f64>,
    dir: &'a DVector<f64>,
    f0: f64,
    slope0: f64,
    opts: &'a BfgsOptions,
    evals: usize,
}

impl<F, G> LineSearch<'_, F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn eval(&mut self, alpha: f64) -> Point {
        let x = self.x + self.dir * alpha;
        self.evals += 1;
        let f = (self.objective)(x.as_slice());
        let g = DVector::from_vec((self.gradient)(x.as_slice()));
        let slope = g.dot(self.dir);
        Point { alpha, f, g, slope }
    }

    /// Armijo, or its approximate form once `f` differences sink into
    /// rounding noise.
    fn sufficient(&self, pt: &Point) -> bool {
        if !pt.f.is_finite() || !pt.slope.is_finite() {
            return false;
        }
        let armijo = pt.f <= self.f0 + self.opts.c1 * pt.alpha * self.slope0;
        let noise = 1e-12 * self.f0.abs().max(1.0);
        let approximate =
            pt.f <= self.f0 + noise && pt.slope <= (2.0 * self.opts.c1 - 1.0) * self.slope0;
        armijo || approximate
    }

    fn curvature(&self, pt: &Point) -> bool {
        pt.slope.abs() <= -self.opts.c2 * self.slope0
    }

    fn search(&mut self, alpha0: f64) -> Option<Point> {
        let mut prev = Point {
            alpha: 0.0,
            f: self.f0,
            g: DVector::zeros(0),
            slope: self.slope0,
        };
        let mut alpha = alpha0;
        for i in 0..self.opts.max_line_evals {
            let pt = self.eval(alpha);
            if !self.sufficient(&pt) || (i > 0 && pt.f >= prev.f && !self.curvature(&pt)) {
                return self.zoom(prev, pt);
            }
            if self.curvature(&pt) {
                return Some(pt);
            }
            if pt.slope >= 0.0 {
                return self.zoom(pt, prev);
            }
            alpha = 2.0 * pt.alpha;
            prev = pt;
        }
        None
    }

    /// Bracket refinement; `lo` satisfies sufficient decrease.
    fn zoom(&mut self, mut lo: Point, mut hi: Point) -> Option<Point> {
        while self.evals < self.opts.max_line_evals {
            let width = hi.alpha - lo.alpha;
            if width.abs() <= 1e-16 * lo.alpha.abs().max(1.0) {
                return None;
            }
            let mut alpha = quadratic_min(&lo, &hi);
            let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
            let margin = 0.1 * (b - a);
            if !alpha.is_finite() || alpha < a + margin || alpha > b - margin {
                alpha = 0.5 * (lo.alpha + hi.alpha);
            }
            let pt = self.eval(alpha);
            if !self.sufficient(&pt) || pt.f >= lo.f && !self.curvature(&pt) {
                hi = pt;
            } else {
                if self.curvature(&pt) {
                    return Some(pt);
                }
                if pt.slope * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = pt;
            }
        }
        None
    }
}

/// Minimizer of the quadratic through `(lo.f, lo.slope)` and `hi.f`.
fn quadratic_min(lo: &Point, hi: &Point) -> f64 {
    let d = hi.alpha - lo.alpha;
    let curv = hi.f - lo.f - lo.slope * d;
    if !hi.f.is_finite() || curv <= 0.0 {
        return f64::NAN;
    }
    lo.alpha - lo.slope * d * d / (2.0 * curv)
}

/// Quasi-Newton minimization with an inverse-Hessian BFGS update and a
/// strong-Wolfe line search.
///
/// A line-search failure ends the run with `converged = false` and the
/// reason in `message`; only a non-finite start is an error.
pub fn bfgs<F, G>(objective: F, gradient: G, init: &[f64], opts: &BfgsOptions) -> Result<OptimizationResult>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let p = init.len();
    let mut x = DVector::from_column_slice(init);
    let mut f = objective(init);
    let mut g = DVector::from_vec(gradient(init));
    if !f.is_finite() || g.len() != p || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Optimizer(format!(
            "objective or gradient not finite at the starting point (f = {f})"
        )));
    }
    let mut evals = 1usize;
    let mut trace = vec![(evals, f)];
    let mut best_f = f;
    let mut h_inv = DMatrix::<f64>::identity(p, p);
    let mut first = true;
    let mut converged = false;
    let mut message = format!("iteration limit {} reached", opts.max_iter);

    for _ in 0..opts.max_iter {
        let gnorm = g.amax();
        if gnorm < opts.grad_tol {
            converged = true;
            message = format!("gradient norm {gnorm:.3e} below tolerance");
            break;
        }
        let mut dir = -(&h_inv * &g);
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            h_inv = DMatrix::identity(p, p);
            dir = -g.clone();
            slope = g.dot(&dir);
        }
        let alpha0 = if first { (1.0 / g.norm()).min(1.0) } else { 1.0 };
        let mut ls = LineSearch {
            objective: &objective,
            gradient: &gradient,
            x: &x,
            dir: &dir,
            f0: f,
            slope0: slope,
            opts,
            evals: 0,
        };
        let found = ls.search(alpha0);
        evals += ls.evals;
        let Some(pt) = found else {
            message = format!("line search failed (gradient norm {gnorm:.3e})");
            break;
        };
        let s = &dir * pt.alpha;
        let y = &pt.g - &g;
        let sy = s.dot(&y);
        x += &s;
        f = pt.f;
        g = pt.g;
        if f < best_f {
            best_f = f;
            trace.push((evals, f));
        }
        if sy > 1e-12 * s.norm() * y.norm() {
            if first {
                h_inv *= sy / y.dot(&y);
                first = false;
            }
            let rho = 1.0 / sy;
            let hy = &h_inv * &y;
            let yhy = y.dot(&hy);
            // H⁺ = H − ρ(H y sᵀ + s yᵀ H) + (ρ² yᵀHy + ρ) s sᵀ
            h_inv -= (&hy * s.transpose() + &s * hy.transpose()) * rho;
            h_inv += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }
    }
    Ok(OptimizationResult {
        theta_hat: x.as_slice().to_vec(),
        objective: f,
        evaluations: evals,
        converged,
        best_trace: trace,
        rejected: 0,
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_quadratic_solves_linear_system() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, -0.5, 0.0, -0.5, 2.0]);
        let b = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let f = |x: &[f64]| {
            let x = DVector::from_column_slice(x);
            0.5 * x.dot(&(&a * &x)) - b.dot(&x)
        };
        let g = |x: &[f64]| {
            let x = DVector::from_column_slice(x);
            (&a * x - &b).as_slice().to_vec()
        };
        let r = bfgs(f, g, &[0.0, 0.0, 0.0], &BfgsOptions::default()).unwrap();
        let exact = a.clone().lu().solve(&b).unwrap();
        assert!(r.converged, "{}", r.message);
        for i in 0..3 {
            assert!((r.theta_hat[i] - exact[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let r = bfgs(f, g, &[-1.2, 1.0], &BfgsOptions::default()).unwrap();
        assert!(r.converged, "{}", r.message);
        assert!((r.theta_hat[0] - 1.0).abs() < 1e-5);
        assert!((r.theta_hat[1] - 1.0).abs() < 1e-5);
        assert!(r.best_trace.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let r = bfgs(|_: &[f64]| f64::NAN, |_: &[f64]| vec![0.0], &[1.0], &BfgsOptions::default());
        assert!(matches!(r, Err(Error::Optimizer(_))));
    }

    #[test]
    fn inconsistent_gradient_reports_line_search_failure() {
        // gradient points the wrong way: every step increases f
        let r = bfgs(|x: &[f64]| x[0] * x[0], |x: &[f64]| vec![-2.0 * x[0]], &[1.0], &BfgsOptions::default()).unwrap();
        assert!(!r.converged);
        assert!(r.message.contains("line search"), "{}", r.message);
    }
}
