//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

/// Every ordering of `v` (Heap's algorithm), duplicates included.
pub fn all_permutations(v: &[f64]) -> Vec<Vec<f64>> {
    fn heap(k: usize, a: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a = v.to_vec();
    let mut out = Vec::new();
    heap(a.len(), &mut a, &mut out);
    out
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact tail fractions over all reorderings of `b`.
pub fn exhaustive_fractions(a: &[f64], b: &[f64]) -> (f64, f64) {
    let observed = sq_dist(a, b);
    let perms = all_permutations(b);
    let n = perms.len() as f64;
    let greater = perms.iter().filter(|p| sq_dist(a, p) > observed).count() as f64;
    let lower = perms.iter().filter(|p| sq_dist(a, p) < observed).count() as f64;
    (greater / n, lower / n)
}

/// Central differences of a vector-valued function; column `j` is
/// `∂f/∂θⱼ`, returned as rows `[i][j]`.
pub fn fd_jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: F, theta: &[f64], h: f64) -> Vec<Vec<f64>> {
    let p = theta.len();
    let m = f(theta).len();
    let mut jac = vec![vec![0.0; p]; m];
    let mut x = theta.to_vec();
    for j in 0..p {
        x[j] = theta[j] + h;
        let up = f(&x);
        x[j] = theta[j] - h;
        let down = f(&x);
        x[j] = theta[j];
        for i in 0..m {
            jac[i][j] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    jac
}

/// `|a − b| / max(|b|, 1)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Rastrigin function, global minimum 0 at the origin.
pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos() + 10.0)
        .sum()
}
