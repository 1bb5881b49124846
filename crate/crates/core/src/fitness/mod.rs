//! Filter, wrapper and rough-set scoring of feature subsets, combined with a
//! subset-size penalty into one scalar objective.

mod evaluator;
mod filter;
mod knn;
mod rough;

pub use evaluator::SubsetEvaluator;
pub use filter::filter_score;
pub use knn::{knn_accuracy, KnnFolds, Validation};
pub use rough::{rough_set_dependency, RoughSetTable};

use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitnessMode {
    /// Mean absolute feature/label correlation of the selected features.
    FilterCorrelation,
    /// k-NN validation accuracy on the selected features.
    WrapperKnn,
    /// Rough-set dependency degree of the decision on the selected features.
    RoughSetDependency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessSpec {
    pub mode: FitnessMode,
    /// Weight `w` of the quality term; `1 - w` weighs the size reduction.
    pub accuracy_weight: f64,
    pub knn_k: usize,
    pub validation: Validation,
    /// Seed for the wrapper's fold assignment. Fixed for an experiment so that
    /// every run optimizes the same objective.
    pub split_seed: u64,
    /// Equal-width bins used to discretize features for rough sets.
    pub bins: usize,
}

impl Default for FitnessSpec {
    fn default() -> Self {
        Self {
            mode: FitnessMode::WrapperKnn,
            accuracy_weight: 0.8,
            knn_k: 5,
            validation: Validation::Holdout(0.3),
            split_seed: 0,
            bins: 5,
        }
    }
}

impl FitnessSpec {
    pub fn with_mode(mode: FitnessMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.accuracy_weight) {
            return usage(format!(
                "accuracy weight {} outside [0, 1]",
                self.accuracy_weight
            ));
        }
        if self.knn_k == 0 || self.knn_k.is_multiple_of(2) {
            return usage(format!(
                "k-NN k must be a positive odd integer, got {}",
                self.knn_k
            ));
        }
        if self.bins < 2 {
            return usage("rough-set discretization needs at least 2 bins");
        }
        self.validation.validate()
    }
}

/// `w * accuracy + (1 - w) * (1 - selected / total)`.
pub fn subset_objective(accuracy: f64, selected: usize, total: usize, weight: f64) -> f64 {
    weight * accuracy + (1.0 - weight) * (1.0 - selected as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_values() {
        assert_eq!(subset_objective(0.7, 5, 10, 1.0), 0.7);
        assert!((subset_objective(0.9, 3, 12, 0.8) - 0.87).abs() < 1e-12);
        assert!(subset_objective(0.9, 2, 12, 0.8) > subset_objective(0.9, 3, 12, 0.8));
        assert!(subset_objective(0.91, 3, 12, 0.8) > subset_objective(0.9, 3, 12, 0.8));
    }

    #[test]
    fn spec_validation() {
        assert!(FitnessSpec::default().validate().is_ok());
        let bad = [
            FitnessSpec {
                accuracy_weight: 1.5,
                ..Default::default()
            },
            FitnessSpec {
                knn_k: 4,
                ..Default::default()
            },
            FitnessSpec {
                knn_k: 0,
                ..Default::default()
            },
            FitnessSpec {
                validation: Validation::Holdout(0.0),
                ..Default::default()
            },
            FitnessSpec {
                validation: Validation::KFold(1),
                ..Default::default()
            },
        ];
        for spec in bad {
            assert!(spec.validate().is_err(), "{spec:?}");
        }
    }
}
