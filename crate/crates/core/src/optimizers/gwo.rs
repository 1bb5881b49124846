//! Grey wolf optimizer: every wolf moves to the average of three candidate
//! positions, one pulled toward each of the alpha, beta and delta leaders.

use rand::Rng;

use super::{
    binarize, check_turbulence, random_position, turbulence, RunState, DEFAULT_TURBULENCE,
};
use crate::engine::{finite_mean, Fitness, RngStream};
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwoConfig {
    /// Starting value of the control parameter `a`; it decays linearly to 0.
    pub a_initial: f64,
    /// Expected number of coordinates re-drawn uniformly per move.
    pub turbulence: f64,
}

impl Default for GwoConfig {
    fn default() -> Self {
        Self {
            a_initial: 2.0,
            turbulence: DEFAULT_TURBULENCE,
        }
    }
}

/// `a` at iteration `t` of `max_iterations`.
pub fn control_parameter(a_initial: f64, t: usize, max_iterations: usize) -> f64 {
    if max_iterations == 0 {
        return a_initial;
    }
    (a_initial * (1.0 - t as f64 / max_iterations as f64)).max(0.0)
}

/// Candidate position pulled toward `leader` with coefficients `a_coef`
/// (`A`) and `c_coef` (`C`): `L - A * |C * L - X|`.
pub fn gwo_candidate(x: &[f64], leader: &[f64], a_coef: &[f64], c_coef: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(leader)
        .zip(a_coef.iter().zip(c_coef))
        .map(|((&xi, &li), (&a, &c))| li - a * (c * li - xi).abs())
        .collect()
}

/// Per-dimension mean of the candidate positions.
pub fn gwo_combine(candidates: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = candidates.first() else {
        return Vec::new();
    };
    let k = candidates.len() as f64;
    (0..first.len())
        .map(|j| candidates.iter().map(|c| c[j]).sum::<f64>() / k)
        .collect()
}

/// New position of `x` given the three leaders, clamped to the unit cube.
pub fn gwo_position_update(
    x: &[f64],
    leaders: [&[f64]; 3],
    a: f64,
    rng: &mut RngStream,
) -> Vec<f64> {
    let candidates: Vec<Vec<f64>> = leaders
        .iter()
        .map(|leader| {
            let mut a_coef = Vec::with_capacity(x.len());
            let mut c_coef = Vec::with_capacity(x.len());
            for _ in 0..x.len() {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                a_coef.push(2.0 * a * r1 - a);
                c_coef.push(2.0 * r2);
            }
            gwo_candidate(x, leader, &a_coef, &c_coef)
        })
        .collect();
    let mut next = gwo_combine(&candidates);
    super::clamp_unit(&mut next);
    next
}

#[derive(Debug, Clone)]
pub struct WolfPack {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    /// Best three positions seen so far, best first.
    pub leaders: Vec<(Vec<f64>, f64)>,
}

impl WolfPack {
    pub fn new<F: Fitness + ?Sized>(size: usize, fitness: &F, rng: &mut RngStream) -> Result<Self> {
        if size == 0 {
            return usage("wolf pack must not be empty");
        }
        let n = fitness.n_features();
        let positions: Vec<Vec<f64>> = (0..size).map(|_| random_position(n, rng)).collect();
        let scores = positions
            .iter()
            .map(|p| fitness.evaluate(&binarize(p)))
            .collect();
        let mut pack = Self {
            positions,
            fitness: scores,
            leaders: Vec::new(),
        };
        pack.rank_leaders();
        Ok(pack)
    }

    /// Merges the current wolves into the leader set, keeping the top three
    /// distinct positions. Earlier entries win ties.
    fn rank_leaders(&mut self) {
        let mut pool = std::mem::take(&mut self.leaders);
        for (p, &f) in self.positions.iter().zip(&self.fitness) {
            if !pool.iter().any(|(q, _)| q == p) {
                pool.push((p.clone(), f));
            }
        }
        pool.sort_by(|a, b| b.1.total_cmp(&a.1));
        pool.truncate(3);
        self.leaders = pool;
    }

    fn leader(&self, k: usize) -> &[f64] {
        // Fewer than three distinct wolves: reuse the weakest known leader.
        &self.leaders[k.min(self.leaders.len() - 1)].0
    }

    pub fn step<F: Fitness + ?Sized>(
        &mut self,
        a: f64,
        turbulence_rate: f64,
        fitness: &F,
        rng: &mut RngStream,
    ) {
        let leaders = [
            self.leader(0).to_vec(),
            self.leader(1).to_vec(),
            self.leader(2).to_vec(),
        ];
        for i in 0..self.positions.len() {
            let mut next = gwo_position_update(
                &self.positions[i],
                [&leaders[0], &leaders[1], &leaders[2]],
                a,
                rng,
            );
            turbulence(&mut next, turbulence_rate, rng);
            self.fitness[i] = fitness.evaluate(&binarize(&next));
            self.positions[i] = next;
        }
        self.rank_leaders();
    }
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    size: usize,
    config: &GwoConfig,
    rng: &mut RngStream,
) -> Result<()> {
    if config.a_initial.is_nan() || config.a_initial < 0.0 {
        return usage("GWO a_initial must be non-negative");
    }
    check_turbulence(config.turbulence)?;
    let tracker = run.tracker;
    let max_it = run.max_iterations();
    let mut pack = WolfPack::new(size, tracker, rng)?;
    run.iterate(|t| {
        let a = control_parameter(config.a_initial, t, max_it);
        pack.step(a, config.turbulence, tracker, rng);
        Ok(finite_mean(pack.fitness.iter().copied()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::FnFitness;

    #[test]
    fn averaging() {
        let avg = gwo_combine(&[vec![0.0], vec![3.0], vec![6.0]]);
        assert!((avg[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_at_leaders() {
        let x = vec![0.3, 0.9, 0.0];
        let mut rng = RngStream::new(4);
        let next = gwo_position_update(&x, [&x, &x, &x], 0.0, &mut rng);
        assert_eq!(next, x);
    }

    #[test]
    fn output_in_unit_cube() {
        let mut rng = RngStream::new(5);
        for _ in 0..500 {
            let x = random_position(6, &mut rng);
            let l = [
                random_position(6, &mut rng),
                random_position(6, &mut rng),
                random_position(6, &mut rng),
            ];
            let next = gwo_position_update(&x, [&l[0], &l[1], &l[2]], 2.0, &mut rng);
            assert!(next.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn schedule() {
        assert_eq!(control_parameter(2.0, 0, 100), 2.0);
        assert!((control_parameter(2.0, 50, 100) - 1.0).abs() < 1e-15);
        assert_eq!(control_parameter(2.0, 100, 100), 0.0);
    }

    #[test]
    fn leaders_dominate_pack() {
        let f = FnFitness::new(8, |m: &[bool]| {
            m.iter()
                .enumerate()
                .map(|(i, &b)| if b { (i as f64).sin() } else { 0.0 })
                .sum()
        });
        let mut rng = RngStream::new(6);
        let mut pack = WolfPack::new(7, &f, &mut rng).unwrap();
        for t in 0..40 {
            pack.step(control_parameter(2.0, t, 40), 0.0, &f, &mut rng);
            let lf: Vec<f64> = pack.leaders.iter().map(|l| l.1).collect();
            assert!(lf.windows(2).all(|w| w[0] >= w[1]));
            let weakest = *lf.last().unwrap();
            assert!(pack.fitness.iter().all(|&x| x <= lf[0]));
            // Any wolf better than the delta must itself be a leader.
            for (p, &x) in pack.positions.iter().zip(&pack.fitness) {
                if x > weakest {
                    assert!(pack.leaders.iter().any(|(q, _)| q == p));
                }
            }
        }
    }
}
