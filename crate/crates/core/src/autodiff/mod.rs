//! Forward-mode automatic differentiation.
//!
//! Objectives are written once against [`Real`]. [`gradient`] evaluates them
//! on [`Dual`] numbers seeded in all `p` directions; [`hessian`] evaluates
//! them on `Dual<Dual<f64>>`, one column per pass. [`fd_gradient`] is the
//! central-difference reference used to check both.

mod dual;
mod real;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use dual::Dual;
pub use real::Real;

use crate::error::{Error, EvalError, Result};
use crate::objective::{Likelihood, Objective};

/// First derivatives of a scalar objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient(Vec<f64>);

impl Gradient {
    pub fn new(entries: Vec<f64>) -> Self {
        Gradient(entries)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inf_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

impl std::ops::Index<usize> for Gradient {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Symmetric matrix of second derivatives.
///
/// `asymmetry` is `max|H - Hᵀ| / (1 + max|H|)` measured before the stored
/// matrix was symmetrized to `(H + Hᵀ) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianMatrix {
    matrix: DMatrix<f64>,
    asymmetry: f64,
}

impl HessianMatrix {
    /// Wraps an externally computed Hessian, symmetrizing it.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Argument(format!(
                "Hessian must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asymmetry = relative_asymmetry(&matrix);
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(HessianMatrix { matrix, asymmetry })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }
}

fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let gap = (m - m.transpose()).iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    gap / (1.0 + scale)
}

/// Per-observation scores: row `i` is the gradient of observation `i`'s
/// log-likelihood contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix(DMatrix<f64>);

impl ScoreMatrix {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        ScoreMatrix(matrix)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n_obs(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.0.row_sum().iter().copied().collect()
    }

    /// `GᵀG = Σᵢ gᵢ gᵢᵀ`.
    pub fn outer_product(&self) -> DMatrix<f64> {
        self.0.tr_mul(&self.0)
    }
}

fn check_finite(values: &[f64]) -> Result<(), EvalError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(&v) => Err(EvalError::NonFinite(v)),
        None => Ok(()),
    }
}

fn seeded(theta: &[f64]) -> Vec<Dual> {
    let p = theta.len();
    theta
        .iter()
        .enumerate()
        .map(|(k, &x)| Dual::variable(x, k, p))
        .collect()
}

fn dual_gradient(result: Dual, p: usize) -> Result<Vec<f64>, EvalError> {
    let value = result.value();
    if !value.is_finite() {
        return Err(EvalError::NonFinite(value));
    }
    let g: Vec<f64> = (0..p).map(|k| result.tangent(k)).collect();
    check_finite(&g)?;
    Ok(g)
}

fn check_dim(expected: usize, got: usize) -> Result<(), EvalError> {
    if expected != got {
        return Err(EvalError::Dimension { expected, got });
    }
    Ok(())
}

/// Exact gradient of `f` at `theta`, one forward pass with `p` tangents.
pub fn gradient<O: Objective>(f: &O, theta: &[f64]) -> Result<Gradient, EvalError> {
    check_dim(f.dim(), theta.len())?;
    check_finite(theta)?;
    let out = f.eval(&seeded(theta))?;
    Ok(Gradient(dual_gradient(out, theta.len())?))
}

/// Objective value and gradient from a single pass.
pub fn value_and_gradient<O: Objective>(f: &O, theta: &[f64]) -> Result<(f64, Gradient), EvalError> {
    check_dim(f.dim(), theta.len())?;
    check_finite(theta)?;
    let out = f.eval(&seeded(theta))?;
    let value = out.value();
    Ok((value, Gradient(dual_gradient(out, theta.len())?)))
}

/// Exact Hessian of `f` at `theta`.
///
/// Column `j` comes from one pass on `Dual<Dual<f64>>`: the outer tangent
/// seeds direction `j`, the inner tangents seed all `p` directions. Columns
/// are computed in parallel; the result does not depend on thread count.
pub fn hessian<O: Objective>(f: &O, theta: &[f64]) -> Result<HessianMatrix, EvalError> {
    let p = theta.len();
    check_dim(f.dim(), p)?;
    check_finite(theta)?;
    let columns: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|j| {
            let args: Vec<Dual<Dual>> = theta
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let seed = Dual::constant(if k == j { 1.0 } else { 0.0 });
                    Dual::new(Dual::variable(x, k, p), vec![seed])
                })
                .collect();
            let out = f.eval(&args)?;
            if !out.value().is_finite() {
                return Err(EvalError::NonFinite(out.value()));
            }
            let col: Vec<f64> = (0..p).map(|k| out.tangent(0).tangent(k)).collect();
            check_finite(&col)?;
            Ok(col)
        })
        .collect::<Result<_, _>>()?;
    let matrix = DMatrix::from_fn(p, p, |r, c| columns[c][r]);
    let asymmetry = relative_asymmetry(&matrix);
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    Ok(HessianMatrix { matrix, asymmetry })
}

/// Per-observation gradients of a decomposable log-likelihood.
pub fn score_matrix<L: Likelihood>(model: &L, theta: &[f64]) -> Result<ScoreMatrix, EvalError> {
    let p = theta.len();
    check_dim(model.dim(), p)?;
    check_finite(theta)?;
    let args = seeded(theta);
    let rows: Vec<Vec<f64>> = (0..model.n_obs())
        .into_par_iter()
        .map(|i| {
            model
                .obs_loglik(&args, i)
                .and_then(|out| dual_gradient(out, p))
                .map_err(|e| e.at_observation(i))
        })
        .collect::<Result<_, _>>()?;
    Ok(ScoreMatrix(DMatrix::from_fn(rows.len(), p, |i, k| rows[i][k])))
}

/// Central-difference gradient, `(f(θ + h eᵢ) − f(θ − h eᵢ)) / 2h`.
pub fn fd_gradient<F>(f: F, theta: &[f64], h: f64) -> Result<Gradient>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::Argument(format!("step size must be positive, got {h}")));
    }
    let mut x = theta.to_vec();
    let g = (0..theta.len())
        .map(|i| {
            x[i] = theta[i] + h;
            let up = f(&x);
            x[i] = theta[i] - h;
            let down = f(&x);
            x[i] = theta[i];
            (up - down) / (2.0 * h)
        })
        .collect();
    Ok(Gradient(g))
}
