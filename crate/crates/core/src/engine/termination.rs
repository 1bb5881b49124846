use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminationSpec {
    pub max_iterations: usize,
    /// Stop once the incumbent reaches this fitness.
    pub target_fitness: Option<f64>,
    /// Stop after this many consecutive iterations without improvement.
    pub stagnation_window: Option<usize>,
}

impl TerminationSpec {
    pub fn iterations(max_iterations: usize) -> Self {
        Self {
            max_iterations,
            target_fitness: None,
            stagnation_window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stagnation_window == Some(0) {
            return usage("stagnation window must be positive");
        }
        Ok(())
    }
}

/// Tracks the stopping rule across iterations.
#[derive(Debug, Clone)]
pub struct Termination {
    spec: TerminationSpec,
    best: f64,
    stale: usize,
}

impl Termination {
    pub fn new(spec: TerminationSpec, initial_best: f64) -> Self {
        Self {
            spec,
            best: initial_best,
            stale: 0,
        }
    }

    /// Whether iteration `completed + 1` may run, given `completed`
    /// iterations so far.
    pub fn may_continue(&self, completed: usize) -> bool {
        if completed >= self.spec.max_iterations {
            return false;
        }
        if let Some(target) = self.spec.target_fitness {
            if self.best >= target {
                return false;
            }
        }
        if let Some(window) = self.spec.stagnation_window {
            if self.stale >= window {
                return false;
            }
        }
        true
    }

    /// Records the incumbent after an iteration.
    pub fn observe(&mut self, best: f64) {
        if best > self.best {
            self.best = best;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
    }
}
