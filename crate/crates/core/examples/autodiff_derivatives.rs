//! Exact gradient and Hessian of a small objective, checked against
//! central differences.

use twostep_mle::autodiff::{fd_gradient, gradient, hessian, Real};
use twostep_mle::objective::Objective;
use twostep_mle::EvalError;

/// Rosenbrock's banana with an extra smooth term.
struct Banana;

impl Objective for Banana {
    fn dim(&self) -> usize {
        2
    }

    fn eval<S: Real>(&self, t: &[S]) -> Result<S, EvalError> {
        let a = S::constant(1.0) - t[0].clone();
        let b = t[1].clone() - t[0].clone() * t[0].clone();
        Ok(a.clone() * a + b.clone() * b * 100.0 + t[1].clone().exp())
    }
}

fn main() -> twostep_mle::Result<()> {
    let theta = [-0.8, 1.3];
    let g = gradient(&Banana, &theta)?;
    let fd = fd_gradient(|x| Banana.eval(x).unwrap(), &theta, 1e-6)?;
    println!("gradient (exact): {:?}", g.as_slice());
    println!("gradient (fd):    {:?}", fd.as_slice());

    let h = hessian(&Banana, &theta)?;
    println!("hessian:\n{}", h.matrix());
    println!("asymmetry: {:e}", h.asymmetry());
    Ok(())
}
