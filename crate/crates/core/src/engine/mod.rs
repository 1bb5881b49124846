//! Shared evolutionary machinery: representations, seeded randomness,
//! selection, variation, population-update policies, termination and the
//! memetic local-search decorator.

mod genome;
mod memetic;
mod population;
mod rng;
mod selection;
mod steps;
mod termination;
mod variation;

pub use genome::Genome;
pub use memetic::{memetic_improve, LocalSearchSpec};
pub use population::{argmax, argmin, finite_mean, Fitness, FnFitness, Individual, Population};
pub use rng::{splitmix64, RngStream};
pub use selection::{
    roulette_probabilities, roulette_select, tournament_select, SelectionSpec, ROULETTE_EPSILON,
};
pub use steps::{gga_step, ssga_step, Breeder};
pub use termination::{Termination, TerminationSpec};
pub use variation::{
    arithmetic_crossover, crossover, k_point_crossover_at, mutate, Crossover, VariationSpec,
};
