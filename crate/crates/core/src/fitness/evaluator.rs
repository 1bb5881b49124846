use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{filter_score, rough_set_dependency, subset_objective, FitnessMode, FitnessSpec};
use super::{KnnFolds, RoughSetTable};
use crate::data::{discretize_equal_width, Dataset};
use crate::engine::Fitness;
use crate::error::{usage, Result};

/// Objective for feature-subset search over one dataset.
///
/// Scores are memoized per mask; evaluation is a pure function of the mask so
/// the cache may be shared between concurrent runs.
#[derive(Debug)]
pub struct SubsetEvaluator {
    dataset: Arc<Dataset>,
    spec: FitnessSpec,
    folds: Option<KnnFolds>,
    filter_scores: Vec<f64>,
    rough: RoughSetTable,
    full_dependency: f64,
    cache: Mutex<HashMap<Vec<bool>, f64>>,
}

impl SubsetEvaluator {
    /// `dataset` is expected to be imputed and normalized.
    pub fn new(dataset: Arc<Dataset>, spec: FitnessSpec) -> Result<Self> {
        spec.validate()?;
        if dataset.n_features() == 0 || dataset.n_rows() < 2 {
            return usage("dataset needs at least one feature and two rows");
        }
        if dataset.missing_count() > 0 {
            return usage("dataset still has missing values; impute first");
        }
        let folds = match spec.mode {
            FitnessMode::WrapperKnn => {
                let f = KnnFolds::new(&dataset, spec.validation, spec.split_seed)?;
                if spec.knn_k > f.min_train_size() {
                    return usage(format!(
                        "k = {} exceeds training fold size {}",
                        spec.knn_k,
                        f.min_train_size()
                    ));
                }
                Some(f)
            }
            _ => None,
        };
        let labels = dataset.label_values();
        let filter_scores = (0..dataset.n_features())
            .map(|j| filter_score(&dataset.column(j), &labels))
            .collect::<Result<Vec<_>>>()?;
        let rough = discretize_equal_width(&dataset, spec.bins)?;
        let full_dependency = rough_set_dependency(&rough, &rough.all_attributes())?;
        Ok(Self {
            dataset,
            spec,
            folds,
            filter_scores,
            rough,
            full_dependency,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn spec(&self) -> &FitnessSpec {
        &self.spec
    }

    /// Per-feature filter scores (absolute label correlation).
    pub fn filter_scores(&self) -> &[f64] {
        &self.filter_scores
    }

    /// Discretized view of the dataset.
    pub fn rough_table(&self) -> &RoughSetTable {
        &self.rough
    }

    /// Dependency degree of the full attribute set.
    pub fn full_dependency(&self) -> f64 {
        self.full_dependency
    }

    pub fn dependency(&self, mask: &[bool]) -> f64 {
        let attrs = selected(mask);
        rough_set_dependency(&self.rough, &attrs).expect("mask within table width")
    }

    /// The quality term before the size penalty: accuracy, mean filter score
    /// or dependency degree, depending on the mode.
    pub fn quality(&self, mask: &[bool]) -> Result<f64> {
        if mask.len() != self.dataset.n_features() {
            return usage("mask length differs from feature count");
        }
        let cols = selected(mask);
        if cols.is_empty() {
            return usage("empty feature subset");
        }
        match self.spec.mode {
            FitnessMode::WrapperKnn => self
                .folds
                .as_ref()
                .expect("built for wrapper mode")
                .accuracy(&self.dataset, &cols, self.spec.knn_k),
            FitnessMode::FilterCorrelation => {
                Ok(cols.iter().map(|&j| self.filter_scores[j]).sum::<f64>() / cols.len() as f64)
            }
            FitnessMode::RoughSetDependency => rough_set_dependency(&self.rough, &cols),
        }
    }

    pub fn cached_masks(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

impl Fitness for SubsetEvaluator {
    fn n_features(&self) -> usize {
        self.dataset.n_features()
    }

    fn evaluate(&self, mask: &[bool]) -> f64 {
        if let Some(&v) = self.cache.lock().expect("cache lock").get(mask) {
            return v;
        }
        let value = match self.quality(mask) {
            Ok(q) => subset_objective(
                q,
                mask.iter().filter(|&&b| b).count(),
                mask.len(),
                self.spec.accuracy_weight,
            ),
            Err(_) => f64::NEG_INFINITY,
        };
        self.cache
            .lock()
            .expect("cache lock")
            .insert(mask.to_vec(), value);
        value
    }
}

fn selected(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&j| mask[j]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::Validation;

    fn toy() -> Arc<Dataset> {
        let rows = (0..20)
            .map(|i| vec![(i % 2) as f64, (i % 5) as f64 / 4.0, 0.5])
            .collect();
        let labels = (0..20).map(|i| i % 2).collect();
        Arc::new(Dataset::from_rows(rows, labels).unwrap())
    }

    #[test]
    fn empty_mask_is_infeasible() {
        let ev = SubsetEvaluator::new(toy(), FitnessSpec::default()).unwrap();
        assert_eq!(ev.evaluate(&[false, false, false]), f64::NEG_INFINITY);
    }

    #[test]
    fn modes_score_informative_feature_best() {
        for mode in [
            FitnessMode::WrapperKnn,
            FitnessMode::FilterCorrelation,
            FitnessMode::RoughSetDependency,
        ] {
            let spec = FitnessSpec {
                mode,
                accuracy_weight: 1.0,
                knn_k: 1,
                validation: Validation::Holdout(0.5),
                ..Default::default()
            };
            let ev = SubsetEvaluator::new(toy(), spec).unwrap();
            assert!(
                (ev.evaluate(&[true, false, false]) - 1.0).abs() < 1e-12,
                "{mode:?}"
            );
            assert!(ev.evaluate(&[false, false, true]) < 1.0, "{mode:?}");
        }
    }

    #[test]
    fn cache_is_consistent() {
        let ev = SubsetEvaluator::new(toy(), FitnessSpec::default()).unwrap();
        let a = ev.evaluate(&[true, true, false]);
        assert_eq!(ev.cached_masks(), 1);
        assert_eq!(ev.evaluate(&[true, true, false]), a);
        assert_eq!(ev.cached_masks(), 1);
    }

    #[test]
    fn rejects_missing_values_and_large_k() {
        let mut ds = (*toy()).clone();
        ds.features[0][0] = f64::NAN;
        assert!(SubsetEvaluator::new(Arc::new(ds), FitnessSpec::default()).is_err());
        let spec = FitnessSpec {
            knn_k: 15,
            ..Default::default()
        };
        assert!(SubsetEvaluator::new(toy(), spec).is_err());
    }
}
