use rand::seq::index::sample;
use rand::Rng;

use super::{argmax, RngStream};
use crate::error::{usage, Result};

/// Offset added after shifting non-positive fitness vectors.
pub const ROULETTE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionSpec {
    RouletteWheel,
    Tournament { k: usize },
    Uniform,
}

impl Default for SelectionSpec {
    fn default() -> Self {
        SelectionSpec::Tournament { k: 2 }
    }
}

impl SelectionSpec {
    pub fn validate(&self, capacity: usize) -> Result<()> {
        match *self {
            SelectionSpec::Tournament { k } if k == 0 || k > capacity => {
                usage(format!("tournament size {k} must be in 1..={capacity}"))
            }
            _ => Ok(()),
        }
    }

    pub fn select(&self, fitness: &[f64], rng: &mut RngStream) -> Result<usize> {
        match *self {
            SelectionSpec::RouletteWheel => roulette_select(fitness, rng),
            SelectionSpec::Tournament { k } => tournament_select(fitness, k, rng),
            SelectionSpec::Uniform => {
                if fitness.is_empty() {
                    return usage("cannot select from an empty population");
                }
                Ok(rng.random_range(0..fitness.len()))
            }
        }
    }
}

/// Fitness-proportional selection probabilities `p[i] = f[i] / sum(f)`.
///
/// Vectors containing a non-positive finite value are shifted by their
/// minimum and offset by [`ROULETTE_EPSILON`]. Non-finite entries get zero
/// weight. If no weight remains the distribution is uniform.
pub fn roulette_probabilities(fitness: &[f64]) -> Result<Vec<f64>> {
    if fitness.is_empty() {
        return usage("cannot select from an empty population");
    }
    let finite = fitness.iter().copied().filter(|f| f.is_finite());
    let min = finite.clone().fold(f64::INFINITY, f64::min);
    let shift = if min.is_finite() && min <= 0.0 {
        min - ROULETTE_EPSILON
    } else {
        0.0
    };
    let weights: Vec<f64> = fitness
        .iter()
        .map(|&f| if f.is_finite() { f - shift } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 || !total.is_finite() {
        let p = 1.0 / fitness.len() as f64;
        return Ok(vec![p; fitness.len()]);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Roulette-wheel draw over `fitness`.
pub fn roulette_select(fitness: &[f64], rng: &mut RngStream) -> Result<usize> {
    let probs = roulette_probabilities(fitness)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(i);
        }
    }
    // Rounding left `acc` a hair under 1; return the last positive slot.
    Ok(probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1))
}

/// Samples `k` distinct members and returns the fittest (lowest index on ties).
pub fn tournament_select(fitness: &[f64], k: usize, rng: &mut RngStream) -> Result<usize> {
    if k == 0 || k > fitness.len() {
        return usage(format!(
            "tournament size {k} must be in 1..={}",
            fitness.len()
        ));
    }
    let mut picks = sample(rng, fitness.len(), k).into_vec();
    picks.sort_unstable();
    let winner = argmax(picks.iter().map(|&i| fitness[i])).expect("k >= 1");
    Ok(picks[winner])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roulette_probabilities_direct() {
        let p = roulette_probabilities(&[1.0, 3.0]).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-15 && (p[1] - 0.75).abs() < 1e-15);
        let p = roulette_probabilities(&[2.0; 4]).unwrap();
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn roulette_shifts_non_positive() {
        let p = roulette_probabilities(&[-1.0, 1.0]).unwrap();
        assert!(p[0] < 1e-8 && p[1] > 1.0 - 1e-8);
        let p = roulette_probabilities(&[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
        let p = roulette_probabilities(&[f64::NEG_INFINITY, 2.0]).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
    }

    #[test]
    fn roulette_empty_is_usage_error() {
        let mut rng = RngStream::new(0);
        assert!(roulette_select(&[], &mut rng).is_err());
    }

    #[test]
    fn roulette_monte_carlo() {
        let mut rng = RngStream::new(42);
        let hits = (0..100_000)
            .filter(|_| roulette_select(&[1.0, 3.0], &mut rng).unwrap() == 1)
            .count();
        let freq = hits as f64 / 1e5;
        assert!((freq - 0.75).abs() <= 0.01, "freq {freq}");
    }

    #[test]
    fn tournament_full_size_returns_best() {
        let mut rng = RngStream::new(1);
        let f = [0.3, 0.9, 0.1, 0.9];
        for _ in 0..50 {
            assert_eq!(tournament_select(&f, 4, &mut rng).unwrap(), 1);
        }
        assert!(tournament_select(&f, 5, &mut rng).is_err());
        assert!(tournament_select(&f, 0, &mut rng).is_err());
    }

    #[test]
    fn two_tournament_matches_closed_form() {
        // Strictly increasing fitness: member i wins iff the other pick is
        // below it, so P(i) = i / C(n, 2).
        let n = 10;
        let f: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut rng = RngStream::new(9);
        let mut counts = vec![0usize; n];
        let draws = 100_000;
        for _ in 0..draws {
            counts[tournament_select(&f, 2, &mut rng).unwrap()] += 1;
        }
        let pairs = (n * (n - 1) / 2) as f64;
        for (i, &c) in counts.iter().enumerate() {
            let expected = i as f64 / pairs;
            let got = c as f64 / draws as f64;
            assert!(
                (got - expected).abs() <= 0.01,
                "member {i}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn one_tournament_is_uniform() {
        let f = [5.0, 1.0, 3.0, 2.0];
        let mut rng = RngStream::new(2);
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            counts[tournament_select(&f, 1, &mut rng).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 40_000.0 - 0.25).abs() < 0.01);
        }
    }
}
