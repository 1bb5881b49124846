use super::{
    crossover, memetic_improve, mutate, Fitness, Genome, Individual, LocalSearchSpec, Population,
    RngStream, SelectionSpec, VariationSpec,
};
use crate::error::{usage, Result};

/// Parent selection, variation and optional Lamarckian local search used by
/// both GA population-update policies.
#[derive(Debug, Clone, PartialEq)]
pub struct Breeder {
    pub selection: SelectionSpec,
    pub variation: VariationSpec,
    /// Number of incumbent best members copied unchanged by `gga_step`.
    pub elitism: usize,
    pub local_search: Option<LocalSearchSpec>,
}

impl Default for Breeder {
    fn default() -> Self {
        Self {
            selection: SelectionSpec::default(),
            variation: VariationSpec::default(),
            elitism: 1,
            local_search: None,
        }
    }
}

impl Breeder {
    pub fn validate(&self, capacity: usize, genome_len: usize) -> Result<()> {
        self.selection.validate(capacity)?;
        self.variation.validate(genome_len)?;
        if self.elitism > capacity {
            return usage(format!(
                "elitism {} exceeds population size {capacity}",
                self.elitism
            ));
        }
        Ok(())
    }

    fn parents<'p>(
        &self,
        pop: &'p Population,
        scores: &[f64],
        rng: &mut RngStream,
    ) -> Result<(&'p Genome, &'p Genome)> {
        let a = self.selection.select(scores, rng)?;
        let b = self.selection.select(scores, rng)?;
        Ok((&pop.members[a].genome, &pop.members[b].genome))
    }

    fn finish<F: Fitness + ?Sized>(
        &self,
        child: Genome,
        fitness: &F,
        rng: &mut RngStream,
    ) -> Result<Individual> {
        let child = mutate(&child, &self.variation, rng)?;
        let score = fitness.evaluate_genome(&child);
        let ind = Individual::evaluated(child, score);
        Ok(match &self.local_search {
            Some(ls) => memetic_improve(&ind, fitness, ls, rng),
            None => ind,
        })
    }
}

/// One steady-state update: a single offspring replaces the worst member when
/// it is at least as fit. Returns whether a replacement happened.
pub fn ssga_step<F: Fitness + ?Sized>(
    pop: &mut Population,
    breeder: &Breeder,
    fitness: &F,
    rng: &mut RngStream,
) -> Result<bool> {
    if pop.is_empty() {
        return usage("empty population");
    }
    let scores = pop.scores();
    let (a, b) = breeder.parents(pop, &scores, rng)?;
    let (child, _) = crossover(a, b, &breeder.variation, rng)?;
    let offspring = breeder.finish(child, fitness, rng)?;
    let worst = pop.worst_index().expect("non-empty");
    if offspring.score() >= scores[worst] {
        pop.members[worst] = offspring;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// One generational update: returns a fresh population of the same size. The
/// top `breeder.elitism` members are carried over unchanged.
pub fn gga_step<F: Fitness + ?Sized>(
    pop: &Population,
    breeder: &Breeder,
    fitness: &F,
    rng: &mut RngStream,
) -> Result<Population> {
    if pop.is_empty() {
        return usage("empty population");
    }
    let cap = pop.capacity();
    let scores = pop.scores();
    let mut order: Vec<usize> = (0..cap).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));

    let mut next: Vec<Individual> = order
        .iter()
        .take(breeder.elitism.min(cap))
        .map(|&i| pop.members[i].clone())
        .collect();
    while next.len() < cap {
        let (a, b) = breeder.parents(pop, &scores, rng)?;
        let (c1, c2) = crossover(a, b, &breeder.variation, rng)?;
        next.push(breeder.finish(c1, fitness, rng)?);
        if next.len() < cap {
            next.push(breeder.finish(c2, fitness, rng)?);
        }
    }
    Ok(Population::new(next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::FnFitness;

    fn ones_fitness(n: usize) -> FnFitness<impl Fn(&[bool]) -> f64 + Sync> {
        FnFitness::new(n, |m: &[bool]| m.iter().filter(|&&b| b).count() as f64)
    }

    fn random_pop(cap: usize, n: usize, f: &impl Fitness, rng: &mut RngStream) -> Population {
        let mut pop = Population::new(
            (0..cap)
                .map(|_| Individual::new(Genome::random_mask(n, rng)))
                .collect(),
        );
        pop.evaluate_all(f);
        pop
    }

    #[test]
    fn ssga_rejects_worse_offspring() {
        // Every offspring scores 0 while the population scores 1.
        let f = FnFitness::new(4, |_: &[bool]| 0.0);
        let mut pop = Population::new(
            (0..4)
                .map(|_| Individual::evaluated(Genome::parse_mask("1010").unwrap(), 1.0))
                .collect(),
        );
        let before = pop.clone();
        let mut rng = RngStream::new(0);
        assert!(!ssga_step(&mut pop, &Breeder::default(), &f, &mut rng).unwrap());
        assert_eq!(pop, before);
    }

    #[test]
    fn ssga_better_offspring_raises_best() {
        let f = FnFitness::new(4, |_: &[bool]| 10.0);
        let mut pop = Population::new(
            (0..3)
                .map(|i| Individual::evaluated(Genome::parse_mask("1000").unwrap(), i as f64))
                .collect(),
        );
        let mut rng = RngStream::new(0);
        assert!(ssga_step(&mut pop, &Breeder::default(), &f, &mut rng).unwrap());
        assert_eq!(pop.best_fitness(), 10.0);
        assert_eq!(pop.members[0].score(), 10.0);
        assert_eq!(pop.capacity(), 3);
    }

    #[test]
    fn ssga_best_is_monotone() {
        let f = ones_fitness(20);
        let mut rng = RngStream::new(5);
        let mut pop = random_pop(10, 20, &f, &mut rng);
        let mut best = pop.best_fitness();
        for _ in 0..500 {
            ssga_step(&mut pop, &Breeder::default(), &f, &mut rng).unwrap();
            assert!(pop.best_fitness() >= best);
            best = pop.best_fitness();
        }
    }

    #[test]
    fn gga_keeps_size_and_elite() {
        let f = ones_fitness(12);
        let mut rng = RngStream::new(8);
        for cap in [2, 10, 31] {
            let pop = random_pop(cap, 12, &f, &mut rng);
            let best = pop.best().unwrap().genome.clone();
            let next = gga_step(&pop, &Breeder::default(), &f, &mut rng).unwrap();
            assert_eq!(next.capacity(), cap);
            assert!(next.members.iter().any(|m| m.genome == best));
        }
    }

    #[test]
    fn gga_elitism_monotone_and_input_untouched() {
        let f = ones_fitness(16);
        let mut rng = RngStream::new(13);
        let mut pop = random_pop(8, 16, &f, &mut rng);
        for _ in 0..100 {
            let snapshot = pop.clone();
            let next = gga_step(&pop, &Breeder::default(), &f, &mut rng).unwrap();
            assert_eq!(pop, snapshot);
            assert!(next.best_fitness() >= pop.best_fitness());
            pop = next;
        }
    }

    #[test]
    fn steps_are_deterministic() {
        let f = ones_fitness(10);
        let mut r0 = RngStream::new(99);
        let pop = random_pop(6, 10, &f, &mut r0);
        let run = |seed| {
            let mut rng = RngStream::new(seed);
            let mut p = pop.clone();
            for _ in 0..20 {
                ssga_step(&mut p, &Breeder::default(), &f, &mut rng).unwrap();
            }
            gga_step(&p, &Breeder::default(), &f, &mut rng).unwrap()
        };
        assert_eq!(run(1), run(1));
    }
}
