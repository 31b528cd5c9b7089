use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::squared_distance;
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_PERMUTATIONS: usize = 100_000;

/// Iterations per independently seeded block.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PermutationTestResult {
    pub observed: f64,
    /// Share of permutations whose distance is strictly greater than observed.
    pub fraction_greater: f64,
    /// Share of permutations whose distance is strictly lower than observed.
    pub fraction_lower: f64,
    pub iterations: usize,
    pub seed: u64,
}

/// Compares `‖a − b‖` against distances to uniformly random reorderings of
/// `b`'s coordinates, with `a` held fixed.
///
/// Iterations run in blocks of 4096, block `k` seeded with
/// `derive(seed, k)`, so results do not depend on thread count.
pub fn permutation_test(a: &[f64], b: &[f64], iterations: usize, seed: u64) -> Result<PermutationTestResult> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "vectors have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Argument("permutation test needs at least 2 coordinates".into()));
    }
    if iterations < 1 {
        return Err(Error::Argument("need at least one iteration".into()));
    }
    let observed_sq = squared_distance(a, b);
    let blocks = iterations.div_ceil(BLOCK);
    let (greater, lower) = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng(seed::derive(seed, k as u64));
            let count = BLOCK.min(iterations - k * BLOCK);
            let mut shuffled = b.to_vec();
            let (mut greater, mut lower) = (0usize, 0usize);
            for _ in 0..count {
                shuffled.copy_from_slice(b);
                shuffled.shuffle(&mut rng);
                debug_assert!(same_multiset(&shuffled, b));
                let d = squared_distance(a, &shuffled);
                if d > observed_sq {
                    greater += 1;
                } else if d < observed_sq {
                    lower += 1;
                }
            }
            (greater, lower)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(PermutationTestResult {
        observed: observed_sq.sqrt(),
        fraction_greater: greater as f64 / iterations as f64,
        fraction_lower: lower as f64 / iterations as f64,
        iterations,
        seed,
    })
}

fn same_multiset(x: &[f64], y: &[f64]) -> bool {
    let mut x = x.to_vec();
    let mut y = y.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x == y
}
