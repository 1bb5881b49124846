//! Genetic algorithm in steady-state (in-place worst replacement) and
//! generational (whole new population, elitist) forms.

use super::RunState;
use crate::engine::{
    gga_step, ssga_step, Breeder, Crossover, Fitness, Genome, Individual, Population, RngStream,
    SelectionSpec, VariationSpec,
};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    #[default]
    BinaryMask,
    /// Fixed-length list of `m` distinct feature indices.
    IntegerSubset(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub encoding: Encoding,
    pub breeder: Breeder,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            encoding: Encoding::BinaryMask,
            breeder: Breeder {
                selection: SelectionSpec::Tournament { k: 3 },
                variation: VariationSpec {
                    crossover: Crossover::Uniform,
                    mutation_rate: 0.1,
                },
                elitism: 1,
                local_search: None,
            },
        }
    }
}

/// Random initial population for the configured encoding.
pub fn initial_population(
    size: usize,
    n: usize,
    encoding: Encoding,
    rng: &mut RngStream,
) -> Result<Population> {
    let members = (0..size)
        .map(|_| {
            let g = match encoding {
                Encoding::BinaryMask => Genome::random_mask(n, rng),
                Encoding::IntegerSubset(m) => Genome::random_subset(n, m, rng)?,
            };
            Ok(Individual::new(g))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Population::new(members))
}

/// One GA iteration is `pop_size` steady-state steps (SSGA) or one
/// generation (GGA), so both spend the same evaluations per iteration.
pub(crate) fn run(
    run: &mut RunState<'_, '_>,
    pop_size: usize,
    config: &GaConfig,
    steady_state: bool,
    rng: &mut RngStream,
) -> Result<()> {
    let n = run.tracker.n_features();
    let genome_len = match config.encoding {
        Encoding::BinaryMask => n,
        Encoding::IntegerSubset(m) => m,
    };
    config.breeder.validate(pop_size, genome_len.max(2))?;
    let mut pop = initial_population(pop_size, n, config.encoding, rng)?;
    let tracker = run.tracker;
    pop.evaluate_all(tracker);
    run.iterate(|_| {
        if steady_state {
            for _ in 0..pop_size {
                ssga_step(&mut pop, &config.breeder, tracker, rng)?;
            }
        } else {
            pop = gga_step(&pop, &config.breeder, tracker, rng)?;
        }
        Ok(pop.mean_fitness())
    })
}
