//! Particle swarm optimization with a linearly decreasing inertia weight.

use rand::Rng;

use super::{
    binarize, check_turbulence, clamp_unit, random_position, turbulence, RunState,
    DEFAULT_TURBULENCE,
};
use crate::engine::{argmax, finite_mean, Fitness, RngStream};
use crate::error::{usage, Result};

/// Slope of the sigmoid transfer used by [`pso_bit_probability`].
pub const TRANSFER_SLOPE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoConfig {
    pub c1: f64,
    pub c2: f64,
    pub max_velocity: f64,
    pub min_weight: f64,
    pub max_weight: f64,
    /// Expected number of coordinates re-drawn uniformly per move.
    pub turbulence: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            max_velocity: 0.3,
            min_weight: 0.4,
            max_weight: 0.9,
            turbulence: DEFAULT_TURBULENCE,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_velocity.is_nan() || self.max_velocity <= 0.0 {
            return usage("PSO max velocity must be positive");
        }
        if self.min_weight > self.max_weight || self.c1 < 0.0 || self.c2 < 0.0 {
            return usage("PSO needs min_weight <= max_weight and non-negative c1, c2");
        }
        check_turbulence(self.turbulence)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

impl ParticleState {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>, fitness: f64) -> Self {
        Self {
            pbest_position: position.clone(),
            position,
            velocity,
            pbest_fitness: fitness,
        }
    }

    /// Keeps the personal best as a running maximum.
    pub fn observe(&mut self, fitness: f64) -> bool {
        if fitness > self.pbest_fitness {
            self.pbest_fitness = fitness;
            self.pbest_position = self.position.clone();
            true
        } else {
            false
        }
    }
}

/// `w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x)` with fresh uniform `r1`,
/// `r2` per dimension, clamped to `±max_velocity`.
pub fn pso_velocity_update(
    p: &ParticleState,
    gbest: &[f64],
    w: f64,
    c1: f64,
    c2: f64,
    max_velocity: f64,
    rng: &mut RngStream,
) -> Vec<f64> {
    (0..p.position.len())
        .map(|d| {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let x = p.position[d];
            let v =
                w * p.velocity[d] + c1 * r1 * (p.pbest_position[d] - x) + c2 * r2 * (gbest[d] - x);
            v.clamp(-max_velocity, max_velocity)
        })
        .collect()
}

/// Inertia decreasing linearly from `max_weight` at iteration 0 to
/// `min_weight` at `max_iterations`.
pub fn inertia_weight(
    iteration: usize,
    max_iterations: usize,
    min_weight: f64,
    max_weight: f64,
) -> f64 {
    if max_iterations == 0 {
        return max_weight;
    }
    let frac = (iteration as f64 / max_iterations as f64).min(1.0);
    max_weight - (max_weight - min_weight) * frac
}

/// Probability that a coordinate maps to a selected bit under the sigmoid
/// transfer `1 / (1 + exp(-10 (x - 0.5)))`.
pub fn pso_bit_probability(x: f64) -> f64 {
    1.0 / (1.0 + (-TRANSFER_SLOPE * (x - 0.5)).exp())
}

pub fn pso_binarize_stochastic(x: f64, rng: &mut RngStream) -> bool {
    rng.random::<f64>() < pso_bit_probability(x)
}

/// Deterministic threshold: selected iff `x >= 0.5`.
pub fn pso_binarize(x: f64) -> bool {
    x >= 0.5
}

/// A swarm with its global best.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<ParticleState>,
    pub fitness: Vec<f64>,
    pub gbest_position: Vec<f64>,
    pub gbest_fitness: f64,
}

impl Swarm {
    pub fn new<F: Fitness + ?Sized>(
        size: usize,
        config: &PsoConfig,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Self> {
        config.validate()?;
        if size == 0 {
            return usage("swarm must have at least one particle");
        }
        let n = fitness.n_features();
        let mut particles = Vec::with_capacity(size);
        let mut scores = Vec::with_capacity(size);
        for _ in 0..size {
            let x = random_position(n, rng);
            let v: Vec<f64> = (0..n)
                .map(|_| rng.random_range(-config.max_velocity..=config.max_velocity))
                .collect();
            let f = fitness.evaluate(&binarize(&x));
            scores.push(f);
            particles.push(ParticleState::new(x, v, f));
        }
        let best = argmax(scores.iter().copied()).expect("non-empty");
        Ok(Self {
            gbest_position: particles[best].position.clone(),
            gbest_fitness: scores[best],
            particles,
            fitness: scores,
        })
    }

    /// Velocity and position update for every particle, then evaluation and
    /// personal/global best bookkeeping.
    pub fn step<F: Fitness + ?Sized>(
        &mut self,
        w: f64,
        config: &PsoConfig,
        fitness: &F,
        rng: &mut RngStream,
    ) {
        for (p, score) in self.particles.iter_mut().zip(self.fitness.iter_mut()) {
            p.velocity = pso_velocity_update(
                p,
                &self.gbest_position,
                w,
                config.c1,
                config.c2,
                config.max_velocity,
                rng,
            );
            for (x, v) in p.position.iter_mut().zip(p.velocity.iter_mut()) {
                *x += *v;
                // Absorbing walls: a coordinate pushed out of range stops.
                if !(0.0..=1.0).contains(x) {
                    *v = 0.0;
                }
            }
            turbulence(&mut p.position, config.turbulence, rng);
            clamp_unit(&mut p.position);
            *score = fitness.evaluate(&binarize(&p.position));
            p.observe(*score);
        }
        if let Some(i) = argmax(self.particles.iter().map(|p| p.pbest_fitness)) {
            if self.particles[i].pbest_fitness > self.gbest_fitness {
                self.gbest_fitness = self.particles[i].pbest_fitness;
                self.gbest_position = self.particles[i].pbest_position.clone();
            }
        }
    }
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    size: usize,
    config: &PsoConfig,
    rng: &mut RngStream,
) -> Result<()> {
    let tracker = run.tracker;
    let max_it = run.max_iterations();
    let mut swarm = Swarm::new(size, config, tracker, rng)?;
    run.iterate(|t| {
        let w = inertia_weight(t, max_it, config.min_weight, config.max_weight);
        swarm.step(w, config, tracker, rng);
        Ok(finite_mean(swarm.fitness.iter().copied()))
    })
}
