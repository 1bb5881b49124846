use rand::seq::SliceRandom;
use rand::Rng;

use super::{Fitness, Genome, Individual, RngStream};

/// Hill-climbing budget for the memetic decorator. The neighbourhood is a
/// single-gene change (bit flip for masks, one index swapped for an unused
/// one for subsets); only strict improvements are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchSpec {
    /// Maximum fitness evaluations per call.
    pub budget: usize,
}

impl Default for LocalSearchSpec {
    fn default() -> Self {
        Self { budget: 12 }
    }
}

/// First-improvement hill climbing from an evaluated individual. Stops when
/// the budget is spent or a full pass over the neighbourhood finds nothing
/// better. The result is never worse than the input.
pub fn memetic_improve<F: Fitness + ?Sized>(
    ind: &Individual,
    fitness: &F,
    spec: &LocalSearchSpec,
    rng: &mut RngStream,
) -> Individual {
    let mut current = ind.clone();
    if spec.budget == 0 {
        return current;
    }
    let mut score = current.score();
    let mut budget = spec.budget;
    loop {
        let mut improved = false;
        let mut positions: Vec<usize> = (0..current.genome.len()).collect();
        positions.shuffle(rng);
        for pos in positions {
            if budget == 0 {
                return current;
            }
            let Some(candidate) = neighbour(&current.genome, pos, rng) else {
                continue;
            };
            budget -= 1;
            let cand_score = fitness.evaluate_genome(&candidate);
            if cand_score > score {
                score = cand_score;
                current = Individual {
                    genome: candidate,
                    fitness: Some(cand_score),
                    trial_counter: 0,
                };
                improved = true;
            }
        }
        if !improved {
            return current;
        }
    }
}

fn neighbour(g: &Genome, pos: usize, rng: &mut RngStream) -> Option<Genome> {
    match g {
        Genome::BinaryMask(m) => {
            let mut m = m.clone();
            m[pos] = !m[pos];
            Some(Genome::BinaryMask(m))
        }
        Genome::IntegerSubset { indices, n } => {
            let free: Vec<usize> = (0..*n).filter(|i| !indices.contains(i)).collect();
            if free.is_empty() {
                return None;
            }
            let mut indices = indices.clone();
            indices[pos] = free[rng.random_range(0..free.len())];
            Some(Genome::IntegerSubset { indices, n: *n })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::FnFitness;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn zero_budget_is_identity() {
        let f = FnFitness::new(3, |_: &[bool]| panic!("must not evaluate"));
        let ind = Individual::evaluated(Genome::parse_mask("101").unwrap(), 0.5);
        let mut rng = RngStream::new(0);
        assert_eq!(
            memetic_improve(&ind, &f, &LocalSearchSpec { budget: 0 }, &mut rng),
            ind
        );
    }

    #[test]
    fn local_optimum_is_fixed_point() {
        // Peak at 101: every single flip is worse.
        let target = [true, false, true];
        let f = FnFitness::new(3, move |m: &[bool]| {
            -(m.iter().zip(&target).filter(|(a, b)| a != b).count() as f64)
        });
        let g = Genome::parse_mask("101").unwrap();
        let ind = Individual::evaluated(g.clone(), 0.0);
        let mut rng = RngStream::new(1);
        let out = memetic_improve(&ind, &f, &LocalSearchSpec { budget: 50 }, &mut rng);
        assert_eq!(out.genome, g);
    }

    #[test]
    fn climbs_and_respects_budget() {
        let calls = AtomicUsize::new(0);
        let f = FnFitness::new(8, |m: &[bool]| {
            calls.fetch_add(1, Ordering::Relaxed);
            m.iter().filter(|&&b| b).count() as f64
        });
        let g = Genome::BinaryMask(vec![false; 8]);
        let ind = Individual::evaluated(g, 0.0);
        let mut rng = RngStream::new(2);
        let out = memetic_improve(&ind, &f, &LocalSearchSpec { budget: 5 }, &mut rng);
        assert_eq!(calls.load(Ordering::Relaxed), 5);
        assert_eq!(out.score(), 5.0);
        let out = memetic_improve(&ind, &f, &LocalSearchSpec { budget: 100 }, &mut rng);
        assert_eq!(out.score(), 8.0);
    }
}
