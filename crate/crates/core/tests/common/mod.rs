#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use spatreg_core::data::zscore;
use spatreg_core::weights::{spatial_weights, DistanceMatrix};
use spatreg_core::{Matrix, SpatialWeightMatrix, StandardizedVector};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Euclidean distances between random points in the unit square.
pub fn random_distances(rng: &mut StdRng, n: usize) -> DistanceMatrix {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    let m = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
            (dx * dx + dy * dy).sqrt() + 1e-3
        }
    });
    DistanceMatrix::new(m).unwrap()
}

pub fn random_weights(rng: &mut StdRng, n: usize) -> SpatialWeightMatrix {
    spatial_weights(&random_distances(rng, n)).unwrap()
}

pub fn normal(rng: &mut StdRng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_standardized(rng: &mut StdRng, n: usize) -> StandardizedVector {
    let raw: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    zscore(&raw).unwrap()
}

/// `y = rho·x + noise`, both standardized.
pub fn correlated_pair(rng: &mut StdRng, n: usize, rho: f64) -> (StandardizedVector, StandardizedVector) {
    let x: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|xi| rho * xi + (1.0 - rho * rho).sqrt() * normal(rng))
        .collect();
    (zscore(&x).unwrap(), zscore(&y).unwrap())
}

#[allow(clippy::needless_range_loop)]
pub fn brute_bilinear(w: &Matrix, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += w.get(i, j) * a[i] * b[j];
        }
    }
    s
}
