#![allow(dead_code)]

use std::sync::Arc;

use evofs_core::data::Dataset;
use evofs_core::engine::{Fitness, RngStream};
use evofs_core::fitness::{FitnessSpec, SubsetEvaluator};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Uniform features; the label thresholds the centred sum of the first
/// `informative` features plus a little Gaussian noise.
pub fn linear_dataset(n: usize, informative: usize, rows: usize, seed: u64) -> Arc<Dataset> {
    let mut rng = RngStream::new(seed);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut features = Vec::with_capacity(rows);
    let mut labels = Vec::with_capacity(rows);
    for _ in 0..rows {
        let row: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let s: f64 =
            row[..informative].iter().map(|x| x - 0.5).sum::<f64>() + noise.sample(&mut rng);
        labels.push(usize::from(s > 0.0));
        features.push(row);
    }
    Arc::new(Dataset::from_rows(features, labels).unwrap())
}

pub fn evaluator(n: usize, seed: u64) -> SubsetEvaluator {
    SubsetEvaluator::new(
        linear_dataset(n, 3.min(n - 1), 150, seed),
        FitnessSpec::default(),
    )
    .unwrap()
}

/// Exhaustive maximum over every non-empty mask.
pub fn brute_force(f: &dyn Fitness) -> (f64, Vec<bool>) {
    let n = f.n_features();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for bits in 1u64..(1 << n) {
        let mask: Vec<bool> = (0..n).map(|j| bits >> j & 1 == 1).collect();
        let v = f.evaluate(&mask);
        if v > best.0 {
            best = (v, mask);
        }
    }
    best
}
