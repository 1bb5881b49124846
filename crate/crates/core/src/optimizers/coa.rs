//! Coyote optimization: coyotes live in packs, move toward the pack alpha and
//! cultural tendency, breed pups that may replace the pack's worst member,
//! and occasionally migrate between packs.

use rand::seq::index::sample;
use rand::Rng;

use super::{binarize, clamp_unit, random_position, RunState};
use crate::engine::{argmax, argmin, finite_mean, Fitness, RngStream};
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoaConfig {
    /// Coyotes per pack `N_c`; the pack count is `pop_size / N_c`.
    pub coyotes_per_pack: usize,
    /// Scatter probability `P_s`; `None` means `1 / n`.
    pub scatter: Option<f64>,
    /// Association probability `P_a`; `None` means `(1 - P_s) / 2`.
    pub association: Option<f64>,
}

impl Default for CoaConfig {
    fn default() -> Self {
        Self {
            coyotes_per_pack: 5,
            scatter: None,
            association: None,
        }
    }
}

impl CoaConfig {
    /// Resolved `(P_s, P_a)` for an `n`-dimensional problem.
    pub fn probabilities(&self, n: usize) -> Result<(f64, f64)> {
        let p_s = self.scatter.unwrap_or(1.0 / n.max(1) as f64);
        let p_a = self.association.unwrap_or((1.0 - p_s) / 2.0);
        if !(0.0..=1.0).contains(&p_s) || !(0.0..=1.0).contains(&p_a) || p_s + p_a > 1.0 + 1e-12 {
            return usage(format!(
                "COA needs P_s, P_a in [0, 1] with P_s + P_a <= 1 (got {p_s}, {p_a})"
            ));
        }
        Ok((p_s, p_a))
    }
}

/// `P_e = min(1, 0.005 * N_c^2)`.
pub fn coa_exchange_probability(coyotes_per_pack: usize) -> f64 {
    (0.005 * (coyotes_per_pack as f64).powi(2)).min(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coyote {
    pub soc: Vec<f64>,
    pub fit: f64,
    pub age: usize,
}

#[derive(Debug, Clone)]
pub struct CoyotePack {
    pub packs: Vec<Vec<Coyote>>,
    pub scatter: f64,
    pub association: f64,
    pub exchange: f64,
}

impl CoyotePack {
    pub fn new<F: Fitness + ?Sized>(
        n_packs: usize,
        coyotes_per_pack: usize,
        config: &CoaConfig,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if n_packs == 0 || coyotes_per_pack < 3 {
            return usage(format!(
                "COA needs at least one pack of at least 3 coyotes (got {n_packs} x {coyotes_per_pack})"
            ));
        }
        let n = fitness.n_features();
        let (scatter, association) = config.probabilities(n)?;
        let packs = (0..n_packs)
            .map(|_| {
                (0..coyotes_per_pack)
                    .map(|_| {
                        let soc = random_position(n, rng);
                        let fit = fitness.evaluate(&binarize(&soc));
                        Coyote { soc, fit, age: 0 }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            packs,
            scatter,
            association,
            exchange: coa_exchange_probability(coyotes_per_pack),
        })
    }

    pub fn total(&self) -> usize {
        self.packs.iter().map(Vec::len).sum()
    }

    pub fn fitness(&self) -> impl Iterator<Item = f64> + '_ {
        self.packs.iter().flatten().map(|c| c.fit)
    }

    pub fn step<F: Fitness + ?Sized>(&mut self, fitness: &F, rng: &mut RngStream) -> Result<()> {
        for p in 0..self.packs.len() {
            let pack = &self.packs[p];
            let fits: Vec<f64> = pack.iter().map(|c| c.fit).collect();
            let alpha = pack[argmax(fits.iter().copied()).expect("non-empty")]
                .soc
                .clone();
            let socs: Vec<Vec<f64>> = pack.iter().map(|c| c.soc.clone()).collect();
            let cult = coa_cultural_tendency(&socs)?;
            let nc = socs.len();
            for i in 0..nc {
                let mut k1 = rng.random_range(0..nc - 1);
                if k1 >= i {
                    k1 += 1;
                }
                let mut k2 = rng.random_range(0..nc - 1);
                if k2 >= i {
                    k2 += 1;
                }
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let c = &self.packs[p][i];
                let (soc, fit) = coa_social_update(
                    &c.soc, c.fit, &alpha, &cult, &socs[k1], &socs[k2], r1, r2, fitness,
                );
                let c = &mut self.packs[p][i];
                c.soc = soc;
                c.fit = fit;
            }
            let pup = coa_birth(&self.packs[p], self.scatter, self.association, rng)?;
            let pup_fit = fitness.evaluate(&binarize(&pup));
            place_pup(&mut self.packs[p], pup, pup_fit);
        }
        coa_pack_exchange(self, rng);
        for c in self.packs.iter_mut().flatten() {
            c.age += 1;
        }
        Ok(())
    }
}

/// Per-dimension median of the pack's social conditions.
pub fn coa_cultural_tendency(socs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = socs.first() else {
        return usage("cultural tendency of an empty pack");
    };
    let nc = socs.len();
    let mut column = vec![0.0; nc];
    Ok((0..first.len())
        .map(|j| {
            for (slot, s) in column.iter_mut().zip(socs) {
                *slot = s[j];
            }
            column.sort_by(f64::total_cmp);
            if nc % 2 == 1 {
                column[nc / 2]
            } else {
                (column[nc / 2 - 1] + column[nc / 2]) / 2.0
            }
        })
        .collect())
}

/// Candidate `soc + r1 * (alpha - peer1) + r2 * (cult - peer2)`, kept only
/// if it scores strictly better than the current condition.
#[allow(clippy::too_many_arguments)]
pub fn coa_social_update<F: Fitness + ?Sized>(
    soc: &[f64],
    fit: f64,
    alpha: &[f64],
    cult: &[f64],
    peer1: &[f64],
    peer2: &[f64],
    r1: f64,
    r2: f64,
    fitness: &F,
) -> (Vec<f64>, f64) {
    let mut cand: Vec<f64> = (0..soc.len())
        .map(|j| soc[j] + r1 * (alpha[j] - peer1[j]) + r2 * (cult[j] - peer2[j]))
        .collect();
    clamp_unit(&mut cand);
    if cand == soc {
        return (soc.to_vec(), fit);
    }
    let f = fitness.evaluate(&binarize(&cand));
    if f > fit {
        (cand, f)
    } else {
        (soc.to_vec(), fit)
    }
}

/// Pup gene selection with explicit draws: `j1`/`j2` are the forced
/// dimensions, `rnd` the per-dimension uniforms and `fresh` the random
/// values used when neither parent contributes.
#[allow(clippy::too_many_arguments)]
pub fn coa_pup(
    parent1: &[f64],
    parent2: &[f64],
    j1: usize,
    j2: Option<usize>,
    rnd: &[f64],
    fresh: &[f64],
    p_s: f64,
    p_a: f64,
) -> Vec<f64> {
    (0..parent1.len())
        .map(|j| {
            if j == j1 {
                parent1[j]
            } else if Some(j) == j2 {
                parent2[j]
            } else if rnd[j] < p_s {
                parent1[j]
            } else if rnd[j] >= p_s + p_a {
                parent2[j]
            } else {
                fresh[j]
            }
        })
        .collect()
}

/// Breeds a pup from two distinct random members of `pack`.
pub fn coa_birth(pack: &[Coyote], p_s: f64, p_a: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if pack.len() < 2 {
        return usage("COA birth needs at least two coyotes in the pack");
    }
    let parents = sample(rng, pack.len(), 2);
    let (a, b) = (&pack[parents.index(0)].soc, &pack[parents.index(1)].soc);
    let n = a.len();
    let (j1, j2) = if n >= 2 {
        let d = sample(rng, n, 2);
        (d.index(0), Some(d.index(1)))
    } else {
        (0, None)
    };
    let rnd: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let fresh = random_position(n, rng);
    Ok(coa_pup(a, b, j1, j2, &rnd, &fresh, p_s, p_a))
}

/// Replaces the pack's worst coyote when the pup scores better.
pub fn place_pup(pack: &mut [Coyote], pup: Vec<f64>, pup_fit: f64) -> bool {
    let fits: Vec<f64> = pack.iter().map(|c| c.fit).collect();
    let worst = argmin(fits.iter().copied()).expect("non-empty");
    if pup_fit > fits[worst] {
        pack[worst] = Coyote {
            soc: pup,
            fit: pup_fit,
            age: 0,
        };
        true
    } else {
        false
    }
}

/// With probability `P_e`, two random packs swap one random coyote each.
/// Returns whether an exchange happened.
pub fn coa_pack_exchange(packs: &mut CoyotePack, rng: &mut RngStream) -> bool {
    let np = packs.packs.len();
    if np < 2 || !rng.random_bool(packs.exchange) {
        return false;
    }
    let pair = sample(rng, np, 2);
    let (a, b) = (pair.index(0), pair.index(1));
    let ia = rng.random_range(0..packs.packs[a].len());
    let ib = rng.random_range(0..packs.packs[b].len());
    let ca = packs.packs[a][ia].clone();
    let cb = std::mem::replace(&mut packs.packs[b][ib], ca);
    packs.packs[a][ia] = cb;
    true
}

pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    size: usize,
    config: &CoaConfig,
    rng: &mut RngStream,
) -> Result<()> {
    let nc = config.coyotes_per_pack;
    if nc == 0 || size < nc {
        return usage(format!(
            "COA population {size} is smaller than one pack of {nc}"
        ));
    }
    let tracker = run.tracker;
    let mut packs = CoyotePack::new(size / nc, nc, config, tracker, rng)?;
    run.iterate(|_| {
        packs.step(tracker, rng)?;
        Ok(finite_mean(packs.fitness()))
    })
}
