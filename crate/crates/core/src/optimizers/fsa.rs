//! Fish swarm search for rough-set reducts. Each fish holds an attribute
//! subset and picks the best of a Search, Swarm and Follow move; fish that
//! reach full dependency are recorded as local reducts and respawned.

use std::collections::HashMap;

use rand::Rng;

use super::RunState;
use crate::engine::{argmax, finite_mean, Fitness, Genome, RngStream};
use crate::error::{usage, Result};
use crate::fitness::{rough_set_dependency, RoughSetTable};

const GAMMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsaConfig {
    /// Visible fish are within this Hamming distance; `None` means `ceil(n / 4)`.
    pub visual_scope: Option<usize>,
    /// Fraction of the school that may be visible before the area counts as
    /// crowded.
    pub crowding_factor: f64,
}

impl Default for FsaConfig {
    fn default() -> Self {
        Self {
            visual_scope: None,
            crowding_factor: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fish {
    pub subset: Vec<bool>,
    pub fitness: f64,
    /// Reached full dependency last step; respawned before the next move.
    pub settled: bool,
}

impl Fish {
    pub fn len(&self) -> usize {
        self.subset.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct FishSchool {
    pub fish: Vec<Fish>,
    /// Shortest subset seen with full dependency, as sorted indices.
    pub r_min: Vec<usize>,
    pub visual_scope: usize,
    pub crowding_factor: f64,
    full_dependency: f64,
    gamma_cache: HashMap<Vec<bool>, f64>,
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect()
}

fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

impl FishSchool {
    pub fn new<F: Fitness + ?Sized>(
        size: usize,
        config: &FsaConfig,
        table: &RoughSetTable,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let n = table.n_attributes();
        if n == 0 {
            return usage("FSA needs at least one conditional attribute");
        }
        if fitness.n_features() != n {
            return usage(format!(
                "decision table has {n} attributes but the objective expects {}",
                fitness.n_features()
            ));
        }
        if size == 0 {
            return usage("fish school must not be empty");
        }
        if !(0.0..=1.0).contains(&config.crowding_factor) {
            return usage("FSA crowding factor must be in [0, 1]");
        }
        let full_dependency = rough_set_dependency(table, &table.all_attributes())?;
        let mut school = Self {
            fish: Vec::with_capacity(size),
            r_min: table.all_attributes(),
            visual_scope: config.visual_scope.unwrap_or(n.div_ceil(4)),
            crowding_factor: config.crowding_factor,
            full_dependency,
            gamma_cache: HashMap::new(),
        };
        for _ in 0..size {
            let subset = Genome::random_mask(n, rng).to_mask();
            let fish = school.spawn(subset, table, fitness)?;
            school.fish.push(fish);
        }
        Ok(school)
    }

    pub fn l_min(&self) -> usize {
        self.r_min.len()
    }

    fn dependency(&mut self, table: &RoughSetTable, subset: &[bool]) -> Result<f64> {
        if let Some(&g) = self.gamma_cache.get(subset) {
            return Ok(g);
        }
        let g = rough_set_dependency(table, &indices(subset))?;
        self.gamma_cache.insert(subset.to_vec(), g);
        Ok(g)
    }

    /// Whether `subset` keeps the dependency of the full attribute set.
    pub fn is_reduct(&mut self, table: &RoughSetTable, subset: &[bool]) -> Result<bool> {
        Ok((self.dependency(table, subset)? - self.full_dependency).abs() <= GAMMA_TOL)
    }

    /// Evaluates a fish at `subset` and records it when it is a reduct no
    /// longer than the incumbent.
    fn spawn<F: Fitness + ?Sized>(
        &mut self,
        subset: Vec<bool>,
        table: &RoughSetTable,
        fitness: &F,
    ) -> Result<Fish> {
        let f = fitness.evaluate(&subset);
        let mut fish = Fish {
            subset,
            fitness: f,
            settled: false,
        };
        self.observe(&mut fish, table)?;
        Ok(fish)
    }

    fn observe(&mut self, fish: &mut Fish, table: &RoughSetTable) -> Result<()> {
        if !fish.is_empty() && self.is_reduct(table, &fish.subset)? {
            fish.settled = true;
            if fish.len() <= self.l_min() {
                self.r_min = indices(&fish.subset);
            }
        }
        Ok(())
    }
}

/// Adds a random attribute, or removes one when every attribute is held.
fn search_move(subset: &[bool], rng: &mut RngStream) -> Vec<bool> {
    let mut next = subset.to_vec();
    let absent: Vec<usize> = (0..subset.len()).filter(|&j| !subset[j]).collect();
    if absent.is_empty() {
        let j = rng.random_range(0..subset.len());
        next[j] = false;
    } else {
        next[absent[rng.random_range(0..absent.len())]] = true;
    }
    next
}

fn random_toggle(subset: &[bool], rng: &mut RngStream) -> Vec<bool> {
    let mut next = subset.to_vec();
    let j = rng.random_range(0..subset.len());
    next[j] = !next[j];
    next
}

/// Toggles one random attribute on which `subset` and `target` disagree.
fn step_toward(subset: &[bool], target: &[bool], rng: &mut RngStream) -> Option<Vec<bool>> {
    let diff: Vec<usize> = (0..subset.len())
        .filter(|&j| subset[j] != target[j])
        .collect();
    if diff.is_empty() {
        return None;
    }
    let mut next = subset.to_vec();
    let j = diff[rng.random_range(0..diff.len())];
    next[j] = target[j];
    Some(next)
}

/// Moves every fish to the best of its three candidate subsets.
pub fn fsa_step<F: Fitness + ?Sized>(
    school: &mut FishSchool,
    table: &RoughSetTable,
    fitness: &F,
    rng: &mut RngStream,
) -> Result<()> {
    let n = table.n_attributes();
    let size = school.fish.len();
    for i in 0..size {
        if school.fish[i].settled {
            let mut subset = vec![false; n];
            subset[rng.random_range(0..n)] = true;
            school.fish[i] = school.spawn(subset, table, fitness)?;
            continue;
        }
        let me = school.fish[i].subset.clone();
        let visible: Vec<usize> = (0..size)
            .filter(|&k| k != i && hamming(&school.fish[k].subset, &me) <= school.visual_scope)
            .collect();

        let search = search_move(&me, rng);
        let (swarm, follow) = if visible.is_empty() {
            (search_move(&me, rng), search_move(&me, rng))
        } else {
            let crowded = visible.len() as f64 > school.crowding_factor * (size - 1) as f64;
            let swarm = if crowded {
                random_toggle(&me, rng)
            } else {
                let centre: Vec<bool> = (0..n)
                    .map(|j| {
                        let held = visible
                            .iter()
                            .filter(|&&k| school.fish[k].subset[j])
                            .count();
                        2 * held >= visible.len()
                    })
                    .collect();
                step_toward(&me, &centre, rng).unwrap_or_else(|| random_toggle(&me, rng))
            };
            let scores: Vec<f64> = visible.iter().map(|&k| school.fish[k].fitness).collect();
            let leader =
                &school.fish[visible[argmax(scores.iter().copied()).expect("non-empty")]].subset;
            let follow = step_toward(&me, leader, rng).unwrap_or_else(|| search_move(&me, rng));
            (swarm, follow)
        };

        let candidates = [search, swarm, follow];
        let scores: Vec<f64> = candidates.iter().map(|c| fitness.evaluate(c)).collect();
        let pick = argmax(scores.iter().copied()).expect("non-empty");
        let mut fish = Fish {
            subset: candidates[pick].clone(),
            fitness: scores[pick],
            settled: false,
        };
        school.observe(&mut fish, table)?;
        school.fish[i] = fish;
    }
    Ok(())
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    size: usize,
    config: &FsaConfig,
    table: &RoughSetTable,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    let tracker = run.tracker;
    let mut school = FishSchool::new(size, config, table, tracker, rng)?;
    run.iterate(|_| {
        fsa_step(&mut school, table, tracker, rng)?;
        Ok(finite_mean(school.fish.iter().map(|f| f.fitness)))
    })?;
    Ok(school.r_min)
}
