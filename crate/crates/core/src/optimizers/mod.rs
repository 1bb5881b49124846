//! The eight searchers (GA in steady-state and generational form, ABC, PSO,
//! ACO, GWO, COA, CSO, FSA), all maximizing a [`Fitness`] over feature
//! masks.
//!
//! Swarm methods that move in continuous space (ABC, PSO, GWO, COA, CSO)
//! keep positions in `[0, 1]^n` and read a position as a feature mask by
//! thresholding each coordinate at 0.5.

pub mod abc;
pub mod aco;
pub mod coa;
pub mod cso;
pub mod fsa;
pub mod ga;
pub mod gwo;
pub mod pso;

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::engine::{Fitness, Genome, RngStream, Termination, TerminationSpec};
use crate::error::{usage, Error, Result};
use crate::fitness::{RoughSetTable, SubsetEvaluator};

pub use abc::AbcConfig;
pub use aco::AcoConfig;
pub use coa::CoaConfig;
pub use cso::CsoConfig;
pub use fsa::FsaConfig;
pub use ga::{Encoding, GaConfig};
pub use gwo::GwoConfig;
pub use pso::PsoConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptimizerId {
    GaSsga,
    GaGga,
    Abc,
    Pso,
    Aco,
    Gwo,
    Coa,
    Cso,
    Fsa,
}

impl OptimizerId {
    pub const ALL: [OptimizerId; 9] = [
        OptimizerId::GaSsga,
        OptimizerId::GaGga,
        OptimizerId::Abc,
        OptimizerId::Pso,
        OptimizerId::Aco,
        OptimizerId::Gwo,
        OptimizerId::Coa,
        OptimizerId::Cso,
        OptimizerId::Fsa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerId::GaSsga => "ga-ssga",
            OptimizerId::GaGga => "ga-gga",
            OptimizerId::Abc => "abc",
            OptimizerId::Pso => "pso",
            OptimizerId::Aco => "aco",
            OptimizerId::Gwo => "gwo",
            OptimizerId::Coa => "coa",
            OptimizerId::Cso => "cso",
            OptimizerId::Fsa => "fsa",
        }
    }
}

impl fmt::Display for OptimizerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        OptimizerId::ALL
            .into_iter()
            .find(|id| id.name() == norm)
            .ok_or_else(|| Error::Usage(format!("unknown optimizer {s:?}")))
    }
}

/// Algorithm-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmParams {
    Ga(GaConfig),
    Abc(AbcConfig),
    Pso(PsoConfig),
    Aco(AcoConfig),
    Gwo(GwoConfig),
    Coa(CoaConfig),
    Cso(CsoConfig),
    Fsa(FsaConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Population, colony, swarm, pack total or school size.
    pub pop_size: usize,
    pub params: AlgorithmParams,
}

impl OptimizerConfig {
    pub fn default_for(id: OptimizerId, pop_size: usize) -> Self {
        let params = match id {
            OptimizerId::GaSsga | OptimizerId::GaGga => AlgorithmParams::Ga(GaConfig::default()),
            OptimizerId::Abc => AlgorithmParams::Abc(AbcConfig::default()),
            OptimizerId::Pso => AlgorithmParams::Pso(PsoConfig::default()),
            OptimizerId::Aco => AlgorithmParams::Aco(AcoConfig::default()),
            OptimizerId::Gwo => AlgorithmParams::Gwo(GwoConfig::default()),
            OptimizerId::Coa => AlgorithmParams::Coa(CoaConfig::default()),
            OptimizerId::Cso => AlgorithmParams::Cso(CsoConfig::default()),
            OptimizerId::Fsa => AlgorithmParams::Fsa(FsaConfig::default()),
        };
        Self { pop_size, params }
    }
}

/// What a search runs against: the objective and, for FSA, the discretized
/// decision table. ACO uses per-feature filter scores as its heuristic.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub fitness: &'a dyn Fitness,
    pub rough: Option<&'a RoughSetTable>,
    pub heuristic: Option<&'a [f64]>,
}

impl<'a> Problem<'a> {
    pub fn new(fitness: &'a dyn Fitness) -> Self {
        Self {
            fitness,
            rough: None,
            heuristic: None,
        }
    }

    pub fn from_evaluator(ev: &'a SubsetEvaluator) -> Self {
        Self {
            fitness: ev,
            rough: Some(ev.rough_table()),
            heuristic: Some(ev.filter_scores()),
        }
    }

    pub fn with_rough(mut self, table: &'a RoughSetTable) -> Self {
        self.rough = Some(table);
        self
    }

    pub fn n_features(&self) -> usize {
        self.fitness.n_features()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Best fitness found so far in the run.
    pub best_fitness: f64,
    /// Mean finite fitness of the current population.
    pub mean_fitness: f64,
    /// Subset size of the best-so-far solution.
    pub subset_size: usize,
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub optimizer: OptimizerId,
    pub best: Genome,
    pub best_fitness: f64,
    /// One record per completed iteration.
    pub history: Vec<IterationRecord>,
    pub evaluations: usize,
    /// Smallest full-dependency attribute set found (FSA only).
    pub reduct: Option<Vec<usize>>,
}

impl RunReport {
    pub fn selected_features(&self) -> Vec<usize> {
        self.best.decode()
    }
}

/// Runs optimizer `id` against `problem`.
pub fn run(
    id: OptimizerId,
    problem: Problem<'_>,
    config: &OptimizerConfig,
    termination: &TerminationSpec,
    rng: &mut RngStream,
) -> Result<RunReport> {
    termination.validate()?;
    if problem.n_features() == 0 {
        return usage("problem has no features");
    }
    if config.pop_size == 0 {
        return usage("population size must be positive");
    }
    let tracker = Tracker::new(problem.fitness);
    let mut run = RunState {
        tracker: &tracker,
        termination: *termination,
    };
    let reduct = match (id, &config.params) {
        (OptimizerId::GaSsga, AlgorithmParams::Ga(c)) => {
            ga::run(&mut run, config.pop_size, c, true, rng)?;
            None
        }
        (OptimizerId::GaGga, AlgorithmParams::Ga(c)) => {
            ga::run(&mut run, config.pop_size, c, false, rng)?;
            None
        }
        (OptimizerId::Abc, AlgorithmParams::Abc(c)) => {
            abc::run(&mut run, config.pop_size, c, rng)?;
            None
        }
        (OptimizerId::Pso, AlgorithmParams::Pso(c)) => {
            pso::run(&mut run, config.pop_size, c, rng)?;
            None
        }
        (OptimizerId::Aco, AlgorithmParams::Aco(c)) => {
            aco::run(&mut run, config.pop_size, c, problem, rng)?;
            None
        }
        (OptimizerId::Gwo, AlgorithmParams::Gwo(c)) => {
            gwo::run(&mut run, config.pop_size, c, rng)?;
            None
        }
        (OptimizerId::Coa, AlgorithmParams::Coa(c)) => {
            coa::run(&mut run, config.pop_size, c, rng)?;
            None
        }
        (OptimizerId::Cso, AlgorithmParams::Cso(c)) => {
            cso::run(&mut run, config.pop_size, c, rng)?;
            None
        }
        (OptimizerId::Fsa, AlgorithmParams::Fsa(c)) => {
            let table = problem
                .rough
                .ok_or_else(|| Error::Usage("FSA needs a rough-set decision table".into()))?;
            Some(fsa::run(&mut run, config.pop_size, c, table, rng)?)
        }
        (id, params) => {
            return usage(format!(
                "optimizer {id} cannot take parameters {:?}",
                std::mem::discriminant(params)
            ))
        }
    };
    tracker.finish(id, reduct)
}

/// Per-run bookkeeping shared by the algorithm loops.
pub(crate) struct RunState<'t, 'f> {
    pub tracker: &'t Tracker<'f>,
    pub termination: TerminationSpec,
}

impl RunState<'_, '_> {
    /// Drives `step` until the termination rule fires. `step` performs one
    /// iteration and returns the population's mean fitness.
    pub fn iterate(&mut self, mut step: impl FnMut(usize) -> Result<f64>) -> Result<()> {
        let mut term = Termination::new(self.termination, self.tracker.best_fitness());
        let mut t = 0;
        while term.may_continue(t) {
            let mean = step(t)?;
            t += 1;
            self.tracker.record(t, mean);
            term.observe(self.tracker.best_fitness());
        }
        Ok(())
    }

    pub fn max_iterations(&self) -> usize {
        self.termination.max_iterations
    }
}

struct Incumbent {
    mask: Option<Vec<bool>>,
    fitness: f64,
    evaluations: usize,
    numeric_failure: bool,
    history: Vec<IterationRecord>,
}

/// Wraps the objective: counts evaluations, keeps the best mask ever seen and
/// the per-iteration history.
pub(crate) struct Tracker<'f> {
    inner: &'f dyn Fitness,
    state: Mutex<Incumbent>,
}

impl<'f> Tracker<'f> {
    fn new(inner: &'f dyn Fitness) -> Self {
        Self {
            inner,
            state: Mutex::new(Incumbent {
                mask: None,
                fitness: f64::NEG_INFINITY,
                evaluations: 0,
                numeric_failure: false,
                history: Vec::new(),
            }),
        }
    }

    pub fn best_fitness(&self) -> f64 {
        self.state.lock().expect("tracker lock").fitness
    }

    fn record(&self, iteration: usize, mean_fitness: f64) {
        let mut s = self.state.lock().expect("tracker lock");
        let subset_size = s
            .mask
            .as_ref()
            .map_or(0, |m| m.iter().filter(|&&b| b).count());
        let best_fitness = s.fitness;
        s.history.push(IterationRecord {
            iteration,
            best_fitness,
            mean_fitness,
            subset_size,
        });
    }

    fn finish(self, optimizer: OptimizerId, reduct: Option<Vec<usize>>) -> Result<RunReport> {
        let s = self.state.into_inner().expect("tracker lock");
        if s.numeric_failure {
            return Err(Error::Numeric(format!(
                "{optimizer}: objective returned NaN"
            )));
        }
        let mask = s
            .mask
            .ok_or_else(|| Error::Numeric(format!("{optimizer}: no feasible subset evaluated")))?;
        Ok(RunReport {
            optimizer,
            best: Genome::BinaryMask(mask),
            best_fitness: s.fitness,
            history: s.history,
            evaluations: s.evaluations,
            reduct,
        })
    }
}

impl Fitness for Tracker<'_> {
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    fn evaluate(&self, mask: &[bool]) -> f64 {
        let value = self.inner.evaluate(mask);
        let mut s = self.state.lock().expect("tracker lock");
        s.evaluations += 1;
        if value.is_nan() {
            s.numeric_failure = true;
            return f64::NEG_INFINITY;
        }
        if value > s.fitness || (s.mask.is_none() && value.is_finite()) {
            s.fitness = value;
            s.mask = Some(mask.to_vec());
        }
        value
    }
}

/// Threshold rule: coordinate `>= 0.5` selects the feature.
pub fn binarize(position: &[f64]) -> Vec<bool> {
    position.iter().map(|&x| pso::pso_binarize(x)).collect()
}

pub(crate) fn clamp_unit(v: &mut [f64]) {
    for x in v {
        *x = if x.is_nan() { 0.5 } else { x.clamp(0.0, 1.0) };
    }
}

/// Default expected number of coordinates re-drawn per move by the
/// continuous optimizers.
pub const DEFAULT_TURBULENCE: f64 = 2.0;

/// Re-draws each coordinate uniformly in `[0, 1]` with probability
/// `expected / n`. Thresholded positions pinned at a bound otherwise never
/// flip their bit again.
pub fn turbulence(position: &mut [f64], expected: f64, rng: &mut RngStream) {
    use rand::Rng;
    if expected <= 0.0 || position.is_empty() {
        return;
    }
    let p = (expected / position.len() as f64).min(1.0);
    for x in position {
        if rng.random_bool(p) {
            *x = rng.random();
        }
    }
}

pub(crate) fn check_turbulence(expected: f64) -> Result<()> {
    if expected.is_nan() || expected < 0.0 || expected.is_infinite() {
        return usage(format!(
            "turbulence {expected} must be a non-negative number"
        ));
    }
    Ok(())
}

pub(crate) fn random_position(n: usize, rng: &mut RngStream) -> Vec<f64> {
    use rand::Rng;
    (0..n).map(|_| rng.random::<f64>()).collect()
}
