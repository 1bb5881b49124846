use super::Genome;

/// Scores candidate feature masks. Larger is better; infeasible masks
/// (for instance the empty subset) score `f64::NEG_INFINITY`.
pub trait Fitness: Sync {
    fn n_features(&self) -> usize;
    fn evaluate(&self, mask: &[bool]) -> f64;

    fn evaluate_genome(&self, genome: &Genome) -> f64 {
        match genome {
            Genome::BinaryMask(m) => self.evaluate(m),
            other => self.evaluate(&other.to_mask()),
        }
    }
}

impl<T: Fitness + ?Sized> Fitness for &T {
    fn n_features(&self) -> usize {
        (**self).n_features()
    }

    fn evaluate(&self, mask: &[bool]) -> f64 {
        (**self).evaluate(mask)
    }
}

/// Adapts a closure into a [`Fitness`].
pub struct FnFitness<F> {
    n: usize,
    f: F,
}

impl<F> FnFitness<F>
where
    F: Fn(&[bool]) -> f64 + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> Fitness for FnFitness<F>
where
    F: Fn(&[bool]) -> f64 + Sync,
{
    fn n_features(&self) -> usize {
        self.n
    }

    fn evaluate(&self, mask: &[bool]) -> f64 {
        (self.f)(mask)
    }
}

/// A genome with its cached fitness and ABC trial counter.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<G = Genome> {
    pub genome: G,
    pub fitness: Option<f64>,
    pub trial_counter: usize,
}

impl<G> Individual<G> {
    pub fn new(genome: G) -> Self {
        Self {
            genome,
            fitness: None,
            trial_counter: 0,
        }
    }

    pub fn evaluated(genome: G, fitness: f64) -> Self {
        Self {
            genome,
            fitness: Some(fitness),
            trial_counter: 0,
        }
    }

    /// Fitness, or `-inf` while unevaluated.
    pub fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }

    /// Replaces the fitness; resets the trial counter when it improved and
    /// bumps it otherwise. Returns whether it improved.
    pub fn offer(&mut self, genome: G, fitness: f64) -> bool {
        if fitness > self.score() {
            self.genome = genome;
            self.fitness = Some(fitness);
            self.trial_counter = 0;
            true
        } else {
            self.trial_counter += 1;
            false
        }
    }
}

impl Individual<Genome> {
    pub fn evaluate<F: Fitness + ?Sized>(&mut self, fitness: &F) {
        self.fitness = Some(fitness.evaluate_genome(&self.genome));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population<G = Genome> {
    pub members: Vec<Individual<G>>,
}

impl<G> Population<G> {
    pub fn new(members: Vec<Individual<G>>) -> Self {
        Self { members }
    }

    pub fn capacity(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.members.iter().map(Individual::score).collect()
    }

    /// Index of the fittest member; lowest index wins ties.
    pub fn best_index(&self) -> Option<usize> {
        argmax(self.members.iter().map(Individual::score))
    }

    /// Index of the least fit member; lowest index wins ties.
    pub fn worst_index(&self) -> Option<usize> {
        argmin(self.members.iter().map(Individual::score))
    }

    pub fn best(&self) -> Option<&Individual<G>> {
        self.best_index().map(|i| &self.members[i])
    }

    pub fn best_fitness(&self) -> f64 {
        self.best().map_or(f64::NEG_INFINITY, Individual::score)
    }

    /// Mean over finite fitnesses; NaN when there are none.
    pub fn mean_fitness(&self) -> f64 {
        finite_mean(self.members.iter().map(Individual::score))
    }
}

impl Population<Genome> {
    pub fn evaluate_all<F: Fitness + ?Sized>(&mut self, fitness: &F) {
        for m in &mut self.members {
            if m.fitness.is_none() {
                m.evaluate(fitness);
            }
        }
    }
}

/// First index of the maximum. NaN is never selected over a number.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            None => best = Some((i, v)),
            Some((_, b)) if v > b || (b.is_nan() && !v.is_nan()) => best = Some((i, v)),
            _ => {}
        }
    }
    best.map(|(i, _)| i)
}

/// First index of the minimum.
pub fn argmin(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    argmax(values.into_iter().map(|v| -v))
}

pub fn finite_mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax([1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmin([2.0, 1.0, 1.0]), Some(1));
        assert_eq!(argmax(Vec::<f64>::new()), None);
        assert_eq!(argmax([f64::NEG_INFINITY, 0.5]), Some(1));
    }

    #[test]
    fn offer_tracks_trials() {
        let mut ind = Individual::evaluated(0u8, 1.0);
        assert!(!ind.offer(1, 0.5));
        assert!(!ind.offer(2, 1.0));
        assert_eq!(ind.trial_counter, 2);
        assert!(ind.offer(3, 1.5));
        assert_eq!(ind.trial_counter, 0);
        assert_eq!(ind.genome, 3);
    }

    #[test]
    fn mean_ignores_infeasible() {
        let pop = Population::new(vec![
            Individual::evaluated(0u8, 1.0),
            Individual::evaluated(1u8, f64::NEG_INFINITY),
            Individual::evaluated(2u8, 3.0),
        ]);
        assert_eq!(pop.mean_fitness(), 2.0);
        assert_eq!(pop.best_index(), Some(2));
        assert_eq!(pop.worst_index(), Some(1));
    }
}
