//! Ant colony optimization over features: each ant samples a subset feature
//! by feature with probability proportional to `tau^alpha * eta^beta`;
//! pheromone evaporates and is reinforced by the iteration's best ants.

use rand::Rng;

use super::{Problem, RunState};
use crate::engine::{finite_mean, Fitness, RngStream};
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcoConfig {
    /// Evaporation rate `rho` in (0, 1].
    pub evaporation: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Number of best ants per iteration that deposit pheromone.
    pub top_q: usize,
    pub tau_min: f64,
    pub tau_initial: f64,
    /// Floor applied to the heuristic so uncorrelated features stay reachable.
    pub eta_floor: f64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            evaporation: 0.2,
            alpha: 1.0,
            beta: 1.0,
            top_q: 1,
            tau_min: 0.01,
            tau_initial: 1.0,
            eta_floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneTable {
    pub tau: Vec<f64>,
    pub eta: Vec<f64>,
    pub evaporation: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau_min: f64,
}

impl PheromoneTable {
    pub fn new(eta: Vec<f64>, config: &AcoConfig) -> Result<Self> {
        if !(config.evaporation > 0.0 && config.evaporation <= 1.0) {
            return usage(format!(
                "evaporation rate {} must be in (0, 1]",
                config.evaporation
            ));
        }
        if config.tau_min.is_nan()
            || config.tau_min <= 0.0
            || config.alpha < 0.0
            || config.beta < 0.0
        {
            return usage("ACO needs tau_min > 0 and non-negative exponents");
        }
        Ok(Self {
            tau: vec![config.tau_initial.max(config.tau_min); eta.len()],
            eta,
            evaporation: config.evaporation,
            alpha: config.alpha,
            beta: config.beta,
            tau_min: config.tau_min,
        })
    }

    fn weight(&self, j: usize) -> f64 {
        self.tau[j].powf(self.alpha) * self.eta[j].powf(self.beta)
    }
}

/// Selection probability of each feature in `available` (same order).
pub fn aco_feature_probability(table: &PheromoneTable, available: &[usize]) -> Result<Vec<f64>> {
    if available.is_empty() {
        return usage("no features left to choose from");
    }
    let weights: Vec<f64> = available.iter().map(|&j| table.weight(j)).collect();
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 || !total.is_finite() {
        let p = 1.0 / available.len() as f64;
        return Ok(vec![p; available.len()]);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// `tau_j <- max(tau_min, (1 - rho) tau_j + sum of fitness of deposited
/// subsets containing j)`.
pub fn aco_update_pheromone(
    table: &PheromoneTable,
    deposits: &[(Vec<usize>, f64)],
) -> PheromoneTable {
    let mut next = table.clone();
    for t in &mut next.tau {
        *t *= 1.0 - table.evaporation;
    }
    for (subset, fitness) in deposits {
        if !fitness.is_finite() {
            continue;
        }
        for &j in subset {
            next.tau[j] += fitness;
        }
    }
    for t in &mut next.tau {
        *t = t.max(table.tau_min);
    }
    next
}

/// One ant's subset: a size drawn uniformly from `1..=n`, then features
/// sampled without replacement by [`aco_feature_probability`].
pub fn construct_subset(table: &PheromoneTable, rng: &mut RngStream) -> Result<Vec<usize>> {
    let n = table.tau.len();
    let size = rng.random_range(1..=n);
    let mut available: Vec<usize> = (0..n).collect();
    let mut chosen = Vec::with_capacity(size);
    while chosen.len() < size {
        let probs = aco_feature_probability(table, &available)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = available.len() - 1;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = k;
                break;
            }
        }
        chosen.push(available.remove(pick));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    ants: usize,
    config: &AcoConfig,
    problem: Problem<'_>,
    rng: &mut RngStream,
) -> Result<()> {
    let tracker = run.tracker;
    let n = tracker.n_features();
    let eta = heuristic(problem, n, config.eta_floor);
    let mut table = PheromoneTable::new(eta, config)?;
    let to_mask = |subset: &[usize]| {
        let mut m = vec![false; n];
        for &j in subset {
            m[j] = true;
        }
        m
    };
    // Initial colony, evaluated so that the zero-iteration run has a best.
    for _ in 0..ants {
        let s = construct_subset(&table, rng)?;
        tracker.evaluate(&to_mask(&s));
    }
    run.iterate(|_| {
        let mut scored = Vec::with_capacity(ants);
        for _ in 0..ants {
            let s = construct_subset(&table, rng)?;
            let f = tracker.evaluate(&to_mask(&s));
            scored.push((s, f));
        }
        let mean = finite_mean(scored.iter().map(|(_, f)| *f));
        // Stable sort keeps the earlier ant on ties.
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        scored.truncate(config.top_q.max(1));
        table = aco_update_pheromone(&table, &scored);
        Ok(mean)
    })
}

/// Per-feature heuristic: the filter score of the evaluator when available,
/// otherwise uniform.
fn heuristic(problem: Problem<'_>, n: usize, floor: f64) -> Vec<f64> {
    match problem.heuristic {
        Some(scores) if scores.len() == n => scores.iter().map(|&s| s.max(floor)).collect(),
        _ => vec![1.0; n],
    }
}
