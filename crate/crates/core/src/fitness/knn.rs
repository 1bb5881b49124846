use crate::data::{row_keys, split, Dataset, SplitPlan, SplitScheme};
use crate::error::{usage, Result};

/// How wrapper accuracy is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validation {
    /// Stratified single split; the fraction is the test share.
    Holdout(f64),
    /// Stratified k-fold; accuracy is the mean over folds.
    KFold(usize),
    /// Train and test on all rows. Diagnostic only.
    Resubstitution,
}

impl Validation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Validation::Holdout(f) if !(f > 0.0 && f < 1.0) => {
                usage(format!("holdout fraction {f} must be in (0, 1)"))
            }
            Validation::KFold(k) if k < 2 => usage(format!("k-fold needs k >= 2, got {k}")),
            _ => Ok(()),
        }
    }
}

/// Precomputed train/test folds for repeated wrapper evaluations.
#[derive(Debug, Clone)]
pub struct KnnFolds {
    /// (train rows, test rows) per fold.
    folds: Vec<(Vec<usize>, Vec<usize>)>,
    keys: Vec<u64>,
}

impl KnnFolds {
    pub fn new(ds: &Dataset, validation: Validation, seed: u64) -> Result<Self> {
        validation.validate()?;
        let all: Vec<usize> = (0..ds.n_rows()).collect();
        let folds = match validation {
            Validation::Resubstitution => vec![(all.clone(), all)],
            Validation::Holdout(f) => {
                let assign = split(ds, &SplitPlan::holdout(f, seed))?;
                vec![partition(&assign, 1)]
            }
            Validation::KFold(k) => {
                let plan = SplitPlan {
                    scheme: SplitScheme::KFold(k),
                    seed,
                    stratified: true,
                };
                let assign = split(ds, &plan)?;
                (0..k).map(|f| partition(&assign, f)).collect()
            }
        };
        Ok(Self {
            folds,
            keys: row_keys(ds, seed),
        })
    }

    pub fn min_train_size(&self) -> usize {
        self.folds.iter().map(|(tr, _)| tr.len()).min().unwrap_or(0)
    }

    /// Mean fold accuracy of k-NN over the selected columns.
    pub fn accuracy(&self, ds: &Dataset, columns: &[usize], k: usize) -> Result<f64> {
        if columns.is_empty() {
            return usage("k-NN needs at least one selected feature");
        }
        if k == 0 || k > self.min_train_size() {
            return usage(format!(
                "k = {k} must be in 1..={} (training fold size)",
                self.min_train_size()
            ));
        }
        let mut total = 0.0;
        for (train, test) in &self.folds {
            let correct = test
                .iter()
                .filter(|&&t| self.predict(ds, columns, k, train, t) == ds.labels[t])
                .count();
            total += correct as f64 / test.len() as f64;
        }
        Ok(total / self.folds.len() as f64)
    }

    fn predict(
        &self,
        ds: &Dataset,
        columns: &[usize],
        k: usize,
        train: &[usize],
        t: usize,
    ) -> usize {
        let query = &ds.features[t];
        // k nearest as (distance, key, row), kept sorted ascending.
        let mut nearest: Vec<(f64, u64, usize)> = Vec::with_capacity(k + 1);
        for &r in train {
            let row = &ds.features[r];
            let d: f64 = columns
                .iter()
                .map(|&j| {
                    let diff = row[j] - query[j];
                    diff * diff
                })
                .sum();
            let cand = (d, self.keys[r], r);
            if nearest.len() == k && !less(&cand, &nearest[k - 1]) {
                continue;
            }
            let pos = nearest.partition_point(|x| less(x, &cand));
            nearest.insert(pos, cand);
            nearest.truncate(k);
        }
        let mut votes = vec![0usize; ds.n_classes().max(1)];
        for &(_, _, r) in &nearest {
            votes[ds.labels[r]] += 1;
        }
        // Majority; ties go to the smallest class index.
        let top = *votes.iter().max().expect("at least one class");
        votes.iter().position(|&v| v == top).expect("max exists")
    }
}

fn less(a: &(f64, u64, usize), b: &(f64, u64, usize)) -> bool {
    a.0.total_cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then(a.2.cmp(&b.2))
        .is_lt()
}

fn partition(assign: &[usize], test_fold: usize) -> (Vec<usize>, Vec<usize>) {
    (0..assign.len()).partition(|&i| assign[i] != test_fold)
}

/// k-NN validation accuracy of the features selected by `mask`.
pub fn knn_accuracy(
    ds: &Dataset,
    mask: &[bool],
    k: usize,
    validation: Validation,
    seed: u64,
) -> Result<f64> {
    if mask.len() != ds.n_features() {
        return usage("mask length differs from feature count");
    }
    let columns: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
    if columns.is_empty() {
        return usage("empty feature subset");
    }
    KnnFolds::new(ds, validation, seed)?.accuracy(ds, &columns, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::RngStream;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn two_clusters(seed: u64) -> Dataset {
        // Feature 0 separates the classes by 10 sigma; feature 1 is noise.
        let mut rng = RngStream::new(seed);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..60 {
            let c = i % 2;
            rows.push(vec![
                c as f64 * 2.0 + noise.sample(&mut rng),
                rng.random::<f64>(),
            ]);
            labels.push(c);
        }
        Dataset::from_rows(rows, labels).unwrap()
    }

    #[test]
    fn resubstitution_1nn_is_perfect() {
        let ds = two_clusters(1);
        let acc = knn_accuracy(&ds, &[false, true], 1, Validation::Resubstitution, 0).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn separable_holdout_is_perfect() {
        let ds = two_clusters(2);
        for mask in [[true, false], [true, true]] {
            for seed in 0..5 {
                let acc = knn_accuracy(&ds, &mask, 5, Validation::Holdout(0.3), seed).unwrap();
                assert_eq!(acc, 1.0);
            }
        }
    }

    #[test]
    fn empty_mask_and_bad_k() {
        let ds = two_clusters(3);
        assert!(knn_accuracy(&ds, &[false, false], 1, Validation::Holdout(0.3), 0).is_err());
        assert!(knn_accuracy(&ds, &[true, false], 100, Validation::Holdout(0.3), 0).is_err());
        assert!(knn_accuracy(&ds, &[true, false], 3, Validation::KFold(1), 0).is_err());
    }

    #[test]
    fn row_permutation_invariance() {
        let ds = two_clusters(4);
        let n = ds.n_rows();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        let permuted = Dataset::from_rows(
            perm.iter().map(|&i| ds.features[i].clone()).collect(),
            perm.iter().map(|&i| ds.labels[i]).collect(),
        )
        .unwrap();
        for v in [Validation::Holdout(0.25), Validation::KFold(4)] {
            let a = knn_accuracy(&ds, &[false, true], 3, v, 11).unwrap();
            let b = knn_accuracy(&permuted, &[false, true], 3, v, 11).unwrap();
            assert_eq!(a, b);
        }
    }
}
