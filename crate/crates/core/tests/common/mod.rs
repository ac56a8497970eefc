#![allow(dead_code)]

use fastsax::bench::random_walks;
use fastsax::series::{znormalize_values, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A normalized series that is either a random walk or white noise, so the
/// checks see both smooth and rough shapes.
pub fn random_series(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let walk = rng.random_bool(0.5);
    let mut x = 0.0;
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let step: f64 = rng.sample(StandardNormal);
            if walk {
                x += step;
                x
            } else {
                step
            }
        })
        .collect();
    znormalize_values(&raw).unwrap()
}

pub fn random_dataset(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Dataset {
    let rows = (0..count).map(|_| random_series(rng, n)).collect();
    Dataset::from_rows(rows).unwrap().normalize().unwrap()
}

pub fn walk_dataset(seed: u64, count: usize, n: usize) -> Dataset {
    Dataset::from_rows(random_walks(seed, 0, count, n).unwrap())
        .unwrap()
        .normalize()
        .unwrap()
}

/// Standard normal CDF through erf, independent of any quantile routine.
pub fn phi(x: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2))
}

/// Quantile by bisection on `phi`.
pub fn bisect_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-12.0f64, 12.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Naive Euclidean distance, written without iterators.
pub fn naive_euclidean(u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..u.len() {
        s += (u[i] - v[i]) * (u[i] - v[i]);
    }
    s.sqrt()
}
