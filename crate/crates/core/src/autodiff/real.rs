use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::EvalError;

/// Scalar interface shared by `f64` and [`Dual`](super::Dual).
///
/// The supported primitive set is: `+ - * /` (also against `f64`), negation,
/// `exp`, `ln`, `sqrt`, `powf`, `powi`, `tanh`, `sin` and `cos`. Primitives
/// with a restricted domain return [`EvalError::Domain`] carrying the
/// primitive name and the offending operand. Comparisons go through
/// [`Real::value`].
pub trait Real:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Sum
{
    fn constant(c: f64) -> Self;

    /// The primal value, stripped of all derivative information.
    fn value(&self) -> f64;

    fn exp(self) -> Self;
    fn ln(self) -> Result<Self, EvalError>;
    fn sqrt(self) -> Result<Self, EvalError>;
    fn powf(self, k: f64) -> Result<Self, EvalError>;
    fn powi(self, n: i32) -> Self;
    fn tanh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    /// Division that rejects a zero divisor instead of producing `inf`.
    fn checked_div(self, rhs: Self) -> Result<Self, EvalError> {
        if rhs.value() == 0.0 {
            return Err(EvalError::Domain {
                op: "div",
                value: rhs.value(),
            });
        }
        Ok(self / rhs)
    }
}

impl Real for f64 {
    fn constant(c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn ln(self) -> Result<Self, EvalError> {
        if self > 0.0 {
            Ok(f64::ln(self))
        } else {
            Err(EvalError::Domain {
                op: "ln",
                value: self,
            })
        }
    }

    fn sqrt(self) -> Result<Self, EvalError> {
        if self >= 0.0 {
            Ok(f64::sqrt(self))
        } else {
            Err(EvalError::Domain {
                op: "sqrt",
                value: self,
            })
        }
    }

    fn powf(self, k: f64) -> Result<Self, EvalError> {
        let bad_negative = self < 0.0 && k.fract() != 0.0;
        let bad_zero = self == 0.0 && k < 0.0;
        if bad_negative || bad_zero || self.is_nan() {
            return Err(EvalError::Domain {
                op: "powf",
                value: self,
            });
        }
        Ok(f64::powf(self, k))
    }

    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }

    fn tanh(self) -> Self {
        f64::tanh(self)
    }

    fn sin(self) -> Self {
        f64::sin(self)
    }

    fn cos(self) -> Self {
        f64::cos(self)
    }
}
