//! Artificial bee colony: employed and onlooker bees refine food sources
//! with `V_i = f_i + v * (f_i - f_j)`; a single scout re-seeds one exhausted
//! source per iteration.

use rand::Rng;

use super::{binarize, check_turbulence, turbulence, RunState, DEFAULT_TURBULENCE};
use crate::engine::{roulette_select, Fitness, Individual, Population, RngStream};
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcConfig {
    /// Failed improvement attempts before a source is abandoned.
    pub limit: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Expected number of coordinates of each candidate re-drawn uniformly.
    pub turbulence: f64,
}

impl Default for AbcConfig {
    fn default() -> Self {
        Self {
            limit: 10,
            lower_bound: 0.0,
            upper_bound: 1.0,
            turbulence: DEFAULT_TURBULENCE,
        }
    }
}

impl AbcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.limit == 0 {
            return usage("ABC limit must be at least 1");
        }
        check_turbulence(self.turbulence)?;
        let unit = 0.0..=1.0;
        if !(unit.contains(&self.lower_bound) && unit.contains(&self.upper_bound))
            || self.lower_bound > self.upper_bound
        {
            return usage(format!(
                "ABC bounds [{}, {}] must satisfy 0 <= lower <= upper <= 1",
                self.lower_bound, self.upper_bound
            ));
        }
        Ok(())
    }
}

/// Neighbour of food `i` relative to food `j`: `f_i + v * (f_i - f_j)`
/// per dimension, clamped to the bounds.
pub fn abc_neighbor(
    foods: &[Vec<f64>],
    i: usize,
    j: usize,
    v: &[f64],
    lower: f64,
    upper: f64,
) -> Result<Vec<f64>> {
    if i == j {
        return usage("ABC neighbour needs two distinct food sources");
    }
    let (fi, fj) = match (foods.get(i), foods.get(j)) {
        (Some(a), Some(b)) => (a, b),
        _ => return usage("food source index out of range"),
    };
    if fi.len() != fj.len() || fi.len() != v.len() {
        return usage("food sources and step vector differ in dimension");
    }
    Ok(fi
        .iter()
        .zip(fj)
        .zip(v)
        .map(|((a, b), s)| (a + s * (a - b)).clamp(lower, upper))
        .collect())
}

/// Scout re-initialisation `lower + v' * (upper - lower)`.
pub fn abc_scout(lower: f64, upper: f64, v_prime: f64) -> f64 {
    lower + v_prime * (upper - lower)
}

/// Food sources of a colony with `2 * n_food` bees.
#[derive(Debug, Clone)]
pub struct BeeColony {
    pub foods: Population<Vec<f64>>,
    pub config: AbcConfig,
}

impl BeeColony {
    pub fn new<F: Fitness + ?Sized>(
        n_food: usize,
        config: AbcConfig,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Self> {
        config.validate()?;
        if n_food < 2 {
            return usage("ABC colony needs at least 4 bees (2 food sources)");
        }
        let n = fitness.n_features();
        let foods = (0..n_food)
            .map(|_| {
                let x: Vec<f64> = (0..n)
                    .map(|_| abc_scout(config.lower_bound, config.upper_bound, rng.random()))
                    .collect();
                let f = fitness.evaluate(&binarize(&x));
                Individual::evaluated(x, f)
            })
            .collect();
        Ok(Self {
            foods: Population::new(foods),
            config,
        })
    }

    fn explore<F: Fitness + ?Sized>(
        &mut self,
        i: usize,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<bool> {
        let n_food = self.foods.capacity();
        let mut j = rng.random_range(0..n_food - 1);
        if j >= i {
            j += 1;
        }
        let dim = self.foods.members[i].genome.len();
        let v: Vec<f64> = (0..dim).map(|_| rng.random()).collect();
        let fi = &self.foods.members[i].genome;
        let fj = &self.foods.members[j].genome;
        let cand = abc_neighbor(
            &[fi.clone(), fj.clone()],
            0,
            1,
            &v,
            self.config.lower_bound,
            self.config.upper_bound,
        )?;
        let mut cand = cand;
        turbulence(&mut cand, self.config.turbulence, rng);
        let (lo, hi) = (self.config.lower_bound, self.config.upper_bound);
        for x in &mut cand {
            *x = x.clamp(lo, hi);
        }
        let f = fitness.evaluate(&binarize(&cand));
        Ok(self.foods.members[i].offer(cand, f))
    }

    /// Employed phase, onlooker phase, then at most one scout. Returns the
    /// index of the re-seeded source, if any.
    pub fn step<F: Fitness + ?Sized>(
        &mut self,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Option<usize>> {
        let n_food = self.foods.capacity();
        for i in 0..n_food {
            self.explore(i, fitness, rng)?;
        }
        for _ in 0..n_food {
            let i = roulette_select(&self.foods.scores(), rng)?;
            self.explore(i, fitness, rng)?;
        }
        // The most exhausted source past the limit; lowest index on ties.
        let exhausted = self
            .foods
            .members
            .iter()
            .enumerate()
            .filter(|(_, m)| m.trial_counter >= self.config.limit)
            .max_by(|a, b| {
                a.1.trial_counter
                    .cmp(&b.1.trial_counter)
                    .then(b.0.cmp(&a.0))
            })
            .map(|(i, _)| i);
        if let Some(i) = exhausted {
            let dim = self.foods.members[i].genome.len();
            let (lo, hi) = (self.config.lower_bound, self.config.upper_bound);
            let x: Vec<f64> = (0..dim).map(|_| abc_scout(lo, hi, rng.random())).collect();
            let f = fitness.evaluate(&binarize(&x));
            self.foods.members[i] = Individual::evaluated(x, f);
        }
        Ok(exhausted)
    }
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    colony_size: usize,
    config: &AbcConfig,
    rng: &mut RngStream,
) -> Result<()> {
    let tracker = run.tracker;
    let mut colony = BeeColony::new(colony_size / 2, *config, tracker, rng)?;
    run.iterate(|_| {
        colony.step(tracker, rng)?;
        Ok(colony.foods.mean_fitness())
    })
}
