//! Maximum-likelihood estimation in two steps: find the optimum with a
//! global heuristic (simulated annealing), then evaluate exact derivatives
//! of the same log-likelihood at that point with forward-mode automatic
//! differentiation and turn them into covariance estimates.
//!
//! The crate also carries the benchmarking harness used to judge those
//! estimates: gradient-based baselines, a case-resampling bootstrap and a
//! Euclidean-distance permutation test between standard-error vectors.
//!
//! ```
//! use twostep_mle::autodiff::{gradient, hessian, Real};
//! use twostep_mle::error::EvalError;
//! use twostep_mle::objective::Objective;
//!
//! struct Bowl;
//!
//! impl Objective for Bowl {
//!     fn dim(&self) -> usize {
//!         2
//!     }
//!
//!     fn eval<S: Real>(&self, t: &[S]) -> Result<S, EvalError> {
//!         Ok(t[0].clone() * t[0].clone() + (t[1].clone() * 3.0).exp())
//!     }
//! }
//!
//! let g = gradient(&Bowl, &[1.0, 0.0]).unwrap();
//! assert_eq!(g.as_slice(), &[2.0, 3.0]);
//! let h = hessian(&Bowl, &[1.0, 0.0]).unwrap();
//! assert_eq!(h.matrix()[(1, 1)], 9.0);
//! ```
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod autodiff;
pub mod cli;
pub mod covariance;
pub mod error;
pub mod models;
pub mod objective;
pub mod optimize;
pub mod resample;
pub mod seed;

pub use error::{Error, EvalError, Result};
