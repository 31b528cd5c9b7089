use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Real;
use crate::error::EvalError;

/// Forward-mode dual number with one tangent per seeded direction.
///
/// Constants carry an empty tangent vector and act as zero in every
/// direction; anything that depends on a seeded variable carries the full
/// tangent length. Nesting (`Dual<Dual<f64>>`) yields second derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T = f64> {
    value: T,
    tangents: Vec<T>,
}

impl<T: Real> Dual<T> {
    pub fn new(value: T, tangents: Vec<T>) -> Self {
        Dual { value, tangents }
    }

    /// Variable `index` of a `dim`-dimensional seed.
    pub fn variable(value: T, index: usize, dim: usize) -> Self {
        let tangents = (0..dim)
            .map(|k| T::constant(if k == index { 1.0 } else { 0.0 }))
            .collect();
        Dual { value, tangents }
    }

    pub fn primal(&self) -> &T {
        &self.value
    }

    pub fn tangents(&self) -> &[T] {
        &self.tangents
    }

    pub fn into_parts(self) -> (T, Vec<T>) {
        (self.value, self.tangents)
    }

    /// Tangent `k`, or zero when the number is a constant.
    pub fn tangent(&self, k: usize) -> T {
        self.tangents
            .get(k)
            .cloned()
            .unwrap_or_else(|| T::constant(0.0))
    }

    /// Applies a unary primitive with derivative `slope`: t' = slope * t.
    fn chain(value: T, slope: T, tangents: Vec<T>) -> Self {
        let tangents = tangents.into_iter().map(|t| t * slope.clone()).collect();
        Dual { value, tangents }
    }
}

/// Elementwise combination of two tangent vectors, treating an empty vector
/// as all zeros.
fn combine<T: Real>(
    a: Vec<T>,
    b: Vec<T>,
    both: impl Fn(T, T) -> T,
    only_a: impl Fn(T) -> T,
    only_b: impl Fn(T) -> T,
) -> Vec<T> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => a.into_iter().map(only_a).collect(),
        (true, false) => b.into_iter().map(only_b).collect(),
        (false, false) => {
            assert_eq!(a.len(), b.len(), "tangent length mismatch");
            a.into_iter().zip(b).map(|(x, y)| both(x, y)).collect()
        }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Dual {
            value: self.value + rhs.value,
            tangents: combine(self.tangents, rhs.tangents, |x, y| x + y, |x| x, |y| y),
        }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Dual {
            value: self.value - rhs.value,
            tangents: combine(self.tangents, rhs.tangents, |x, y| x - y, |x| x, |y| -y),
        }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        let tangents = combine(
            self.tangents,
            rhs.tangents,
            |x, y| x * b.clone() + a.clone() * y,
            |x| x * b.clone(),
            |y| a.clone() * y,
        );
        Dual {
            value: a * b,
            tangents,
        }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;

    /// (a/b)' = (a' - (a/b) b') / b
    fn div(self, rhs: Self) -> Self {
        let b = rhs.value;
        let q = self.value / b.clone();
        let tangents = combine(
            self.tangents,
            rhs.tangents,
            |x, y| (x - q.clone() * y) / b.clone(),
            |x| x / b.clone(),
            |y| -(q.clone() * y) / b.clone(),
        );
        Dual { value: q, tangents }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Dual {
            value: -self.value,
            tangents: self.tangents.into_iter().map(|t| -t).collect(),
        }
    }
}

impl<T: Real> Add<f64> for Dual<T> {
    type Output = Self;

    fn add(self, rhs: f64) -> Self {
        Dual {
            value: self.value + rhs,
            tangents: self.tangents,
        }
    }
}

impl<T: Real> Sub<f64> for Dual<T> {
    type Output = Self;

    fn sub(self, rhs: f64) -> Self {
        Dual {
            value: self.value - rhs,
            tangents: self.tangents,
        }
    }
}

impl<T: Real> Mul<f64> for Dual<T> {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        Dual {
            value: self.value * rhs,
            tangents: self.tangents.into_iter().map(|t| t * rhs).collect(),
        }
    }
}

impl<T: Real> Div<f64> for Dual<T> {
    type Output = Self;

    fn div(self, rhs: f64) -> Self {
        Dual {
            value: self.value / rhs,
            tangents: self.tangents.into_iter().map(|t| t / rhs).collect(),
        }
    }
}

impl<T: Real> Sum for Dual<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Dual::constant(0.0), |acc, x| acc + x)
    }
}

impl<T: Real> Real for Dual<T> {
    fn constant(c: f64) -> Self {
        Dual {
            value: T::constant(c),
            tangents: Vec::new(),
        }
    }

    fn value(&self) -> f64 {
        self.value.value()
    }

    fn exp(self) -> Self {
        let e = self.value.exp();
        Dual::chain(e.clone(), e, self.tangents)
    }

    fn ln(self) -> Result<Self, EvalError> {
        let v = self.value.clone().ln()?;
        let slope = T::constant(1.0).checked_div(self.value)?;
        Ok(Dual::chain(v, slope, self.tangents))
    }

    fn sqrt(self) -> Result<Self, EvalError> {
        let s = self.value.sqrt()?;
        let slope = T::constant(0.5).checked_div(s.clone()).map_err(|_| EvalError::Domain {
            op: "sqrt",
            value: 0.0,
        })?;
        Ok(Dual::chain(s, slope, self.tangents))
    }

    fn powf(self, k: f64) -> Result<Self, EvalError> {
        let v = self.value.clone().powf(k)?;
        let slope = if k == 0.0 {
            T::constant(0.0)
        } else {
            self.value.powf(k - 1.0)? * k
        };
        Ok(Dual::chain(v, slope, self.tangents))
    }

    fn powi(self, n: i32) -> Self {
        let v = self.value.clone().powi(n);
        let slope = if n == 0 {
            T::constant(0.0)
        } else {
            self.value.powi(n - 1) * f64::from(n)
        };
        Dual::chain(v, slope, self.tangents)
    }

    fn tanh(self) -> Self {
        let t = self.value.tanh();
        let slope = -(t.clone() * t.clone()) + 1.0;
        Dual::chain(t, slope, self.tangents)
    }

    fn sin(self) -> Self {
        let slope = self.value.clone().cos();
        Dual::chain(self.value.sin(), slope, self.tangents)
    }

    fn cos(self) -> Self {
        let slope = -self.value.clone().sin();
        Dual::chain(self.value.cos(), slope, self.tangents)
    }
}
