//! Chicken swarm optimization: the swarm is ranked into roosters, hens and
//! chicks every `reorder_period` iterations; each role has its own move.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{
    binarize, check_turbulence, clamp_unit, random_position, turbulence, RunState,
    DEFAULT_TURBULENCE,
};
use crate::engine::{finite_mean, Fitness, RngStream};
use crate::error::{usage, Result};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsoConfig {
    pub rooster_ratio: f64,
    pub hen_ratio: f64,
    pub chick_ratio: f64,
    /// Iterations between role reassignments.
    pub reorder_period: usize,
    /// Expected number of coordinates re-drawn uniformly per move.
    pub turbulence: f64,
}

impl Default for CsoConfig {
    fn default() -> Self {
        Self {
            rooster_ratio: 0.2,
            hen_ratio: 0.6,
            chick_ratio: 0.2,
            reorder_period: 10,
            turbulence: DEFAULT_TURBULENCE,
        }
    }
}

impl CsoConfig {
    pub fn validate(&self) -> Result<()> {
        let r = [self.rooster_ratio, self.hen_ratio, self.chick_ratio];
        if r.iter().any(|x| !(0.0..=1.0).contains(x)) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return usage(format!(
                "CSO role ratios {:?} must be in [0, 1] and sum to 1",
                r
            ));
        }
        check_turbulence(self.turbulence)?;
        if self.reorder_period == 0 {
            return usage("CSO reorder period must be at least 1");
        }
        Ok(())
    }
}

/// `(roosters, hens, chicks)` for a swarm of `size`: at least one rooster,
/// chicks capped so the hens absorb the remainder.
pub fn role_counts(size: usize, config: &CsoConfig) -> (usize, usize, usize) {
    let roosters = ((config.rooster_ratio * size as f64).floor() as usize).clamp(1, size.max(1));
    let chicks =
        ((config.chick_ratio * size as f64).floor() as usize).min(size - roosters.min(size));
    (roosters, size - roosters - chicks, chicks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Rooster,
    /// Hen following the rooster at the given index.
    Hen(usize),
    /// Chick following the mother hen at the given index.
    Chick(usize),
}

/// Rooster step variance against a peer rooster (maximization).
pub fn rooster_variance(f_self: f64, f_peer: f64) -> f64 {
    if f_peer <= f_self || !f_peer.is_finite() {
        1.0
    } else {
        bounded_exp((f_self - f_peer) / (f_self.abs() + EPS))
    }
}

fn bounded_exp(x: f64) -> f64 {
    if x.is_nan() {
        1.0
    } else {
        x.clamp(-50.0, 50.0).exp()
    }
}

/// Chick move `x + fl * (mother - x)`.
pub fn chick_move(x: &[f64], mother: &[f64], fl: f64) -> Vec<f64> {
    x.iter()
        .zip(mother)
        .map(|(&a, &m)| a + fl * (m - a))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ChickenSwarm {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub roles: Vec<Role>,
    pub config: CsoConfig,
    iteration: usize,
}

impl ChickenSwarm {
    pub fn new<F: Fitness + ?Sized>(
        size: usize,
        config: CsoConfig,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Self> {
        config.validate()?;
        if size == 0 {
            return usage("chicken swarm must not be empty");
        }
        let n = fitness.n_features();
        let positions: Vec<Vec<f64>> = (0..size).map(|_| random_position(n, rng)).collect();
        let scores = positions
            .iter()
            .map(|p| fitness.evaluate(&binarize(p)))
            .collect();
        let mut swarm = Self {
            positions,
            fitness: scores,
            roles: vec![Role::Rooster; size],
            config,
            iteration: 0,
        };
        swarm.assign_roles(rng);
        Ok(swarm)
    }

    /// Ranks the swarm: best are roosters, worst are chicks.
    pub fn assign_roles(&mut self, rng: &mut RngStream) {
        let size = self.positions.len();
        let (nr, nh, _) = role_counts(size, &self.config);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| self.fitness[b].total_cmp(&self.fitness[a]).then(a.cmp(&b)));
        let roosters = &order[..nr];
        let hens = &order[nr..nr + nh];
        for (rank, &i) in order.iter().enumerate() {
            self.roles[i] = if rank < nr {
                Role::Rooster
            } else if rank < nr + nh {
                Role::Hen(roosters[rng.random_range(0..nr)])
            } else if nh > 0 {
                Role::Chick(hens[rng.random_range(0..nh)])
            } else {
                Role::Chick(roosters[rng.random_range(0..nr)])
            };
        }
    }

    pub fn count(&self, pred: impl Fn(&Role) -> bool) -> usize {
        self.roles.iter().filter(|r| pred(r)).count()
    }
}

/// One synchronous move of every member, then re-evaluation. Roles are
/// reassigned first when the reorder period has elapsed.
pub fn cso_step<F: Fitness + ?Sized>(swarm: &mut ChickenSwarm, fitness: &F, rng: &mut RngStream) {
    if swarm.iteration > 0 && swarm.iteration.is_multiple_of(swarm.config.reorder_period) {
        swarm.assign_roles(rng);
    }
    swarm.iteration += 1;
    let size = swarm.positions.len();
    let roosters: Vec<usize> = (0..size)
        .filter(|&i| swarm.roles[i] == Role::Rooster)
        .collect();
    let old = swarm.positions.clone();
    let f = &swarm.fitness;
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    for i in 0..size {
        let x = &old[i];
        let mut next = match swarm.roles[i] {
            Role::Rooster => {
                let var = if roosters.len() > 1 {
                    let mut k = roosters[rng.random_range(0..roosters.len() - 1)];
                    if k == i {
                        k = *roosters.last().expect("rooster");
                    }
                    rooster_variance(f[i], f[k])
                } else {
                    1.0
                };
                let sd = var.sqrt();
                x.iter()
                    .map(|&v| v * (1.0 + sd * std_normal.sample(rng)))
                    .collect()
            }
            Role::Hen(r1) => {
                // A random member better than this hen, otherwise any other.
                let better: Vec<usize> = (0..size).filter(|&k| k != i && f[k] > f[i]).collect();
                let r2 = if !better.is_empty() {
                    better[rng.random_range(0..better.len())]
                } else if size > 1 {
                    let k = rng.random_range(0..size - 1);
                    if k >= i {
                        k + 1
                    } else {
                        k
                    }
                } else {
                    i
                };
                let s1 = bounded_exp((f[r1] - f[i]) / (f[i].abs() + EPS));
                let s2 = bounded_exp(f[i] - f[r2]);
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let a: f64 = rng.random();
                        let b: f64 = rng.random();
                        v + s1 * a * (old[r1][j] - v) + s2 * b * (old[r2][j] - v)
                    })
                    .collect()
            }
            Role::Chick(mother) => chick_move(x, &old[mother], rng.random_range(0.0..=2.0)),
        };
        turbulence(&mut next, swarm.config.turbulence, rng);
        clamp_unit(&mut next);
        swarm.positions[i] = next;
    }
    for i in 0..size {
        swarm.fitness[i] = fitness.evaluate(&binarize(&swarm.positions[i]));
    }
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    size: usize,
    config: &CsoConfig,
    rng: &mut RngStream,
) -> Result<()> {
    let tracker = run.tracker;
    let mut swarm = ChickenSwarm::new(size, *config, tracker, rng)?;
    run.iterate(|_| {
        cso_step(&mut swarm, tracker, rng);
        Ok(finite_mean(swarm.fitness.iter().copied()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::FnFitness;

    #[test]
    fn counts() {
        let c = CsoConfig::default();
        assert_eq!(role_counts(10, &c), (2, 6, 2));
        assert_eq!(role_counts(1, &c), (1, 0, 0));
        assert_eq!(role_counts(30, &c), (6, 18, 6));
        let bad = CsoConfig {
            hen_ratio: 0.5,
            ..c
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn roles_follow_ranking() {
        let f = FnFitness::new(6, |m: &[bool]| m.iter().filter(|&&b| b).count() as f64);
        let mut rng = RngStream::new(8);
        let swarm = ChickenSwarm::new(10, CsoConfig::default(), &f, &mut rng).unwrap();
        assert_eq!(swarm.count(|r| *r == Role::Rooster), 2);
        assert_eq!(swarm.count(|r| matches!(r, Role::Hen(_))), 6);
        assert_eq!(swarm.count(|r| matches!(r, Role::Chick(_))), 2);
        let worst_rooster = (0..10)
            .filter(|&i| swarm.roles[i] == Role::Rooster)
            .map(|i| swarm.fitness[i])
            .fold(f64::INFINITY, f64::min);
        assert!(swarm.fitness.iter().filter(|&&x| x > worst_rooster).count() < 2);
        for r in &swarm.roles {
            match *r {
                Role::Hen(k) => assert_eq!(swarm.roles[k], Role::Rooster),
                Role::Chick(k) => assert!(matches!(swarm.roles[k], Role::Hen(_))),
                Role::Rooster => {}
            }
        }
    }

    #[test]
    fn lone_rooster_moves() {
        let f = FnFitness::new(4, |_: &[bool]| 1.0);
        let mut rng = RngStream::new(9);
        let mut swarm = ChickenSwarm::new(1, CsoConfig::default(), &f, &mut rng).unwrap();
        let before = swarm.positions[0].clone();
        cso_step(&mut swarm, &f, &mut rng);
        assert_eq!(swarm.roles, vec![Role::Rooster]);
        assert_ne!(swarm.positions[0], before);
    }

    #[test]
    fn chick_at_mother_stays() {
        let x = vec![0.3, 0.8];
        for fl in [0.0, 0.7, 2.0] {
            assert_eq!(chick_move(&x, &x, fl), x);
        }
        assert_eq!(chick_move(&[0.0], &[1.0], 0.5), vec![0.5]);
    }

    #[test]
    fn variance_rule() {
        assert_eq!(rooster_variance(2.0, 1.0), 1.0);
        assert!(rooster_variance(1.0, 2.0) < 1.0);
        assert_eq!(rooster_variance(1.0, 1.0), 1.0);
    }

    #[test]
    fn positions_stay_in_unit_cube() {
        let f = FnFitness::new(5, |m: &[bool]| m.iter().filter(|&&b| b).count() as f64);
        let mut rng = RngStream::new(10);
        let mut swarm = ChickenSwarm::new(12, CsoConfig::default(), &f, &mut rng).unwrap();
        for _ in 0..60 {
            cso_step(&mut swarm, &f, &mut rng);
            assert!(swarm
                .positions
                .iter()
                .flatten()
                .all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
