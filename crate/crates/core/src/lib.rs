//! Nature-inspired feature selection.
//!
//! The crate is organised around a shared evolutionary [`engine`] (genomes,
//! seeded randomness, selection, variation, steady-state and generational
//! population updates, memetic local search) on top of which the
//! [`optimizers`] implement GA, ABC, PSO, ACO, GWO, COA, CSO and FSA as
//! interchangeable searchers over feature subsets. Candidate subsets are
//! scored by the filter, wrapper and rough-set evaluators in [`fitness`].
//! [`data`] covers CSV ingestion and preprocessing, and [`reduction`] holds
//! the PCA and GP feature-generation baselines.
//!
//! All optimizers maximize fitness.

pub mod data;
pub mod engine;
mod error;
pub mod fitness;
pub mod optimizers;
pub mod reduction;

pub use error::{Error, Result};
