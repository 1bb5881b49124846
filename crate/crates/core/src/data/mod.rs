//! Dataset ingestion and preprocessing: CSV loading, mean imputation,
//! min-max normalization, seeded train/test splitting and equal-width
//! discretization for rough-set analysis.

mod csv_io;
mod preprocess;
mod split;

use std::path::PathBuf;

pub use csv_io::{load_csv, parse_csv, write_csv, LabelColumn, LoadOptions};
pub use preprocess::{discretize_equal_width, impute_missing, normalize_minmax, prepare};
pub use split::{row_keys, split, SplitPlan, SplitScheme};

/// Where a dataset came from and what has been done to it, in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    pub transforms: Vec<String>,
}

/// Numeric feature matrix with class labels.
///
/// Missing cells are stored as NaN until [`impute_missing`] runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Row-major, `n_rows x n_features`.
    pub features: Vec<Vec<f64>>,
    /// Class index per row, into `class_names`.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from in-memory parts. Labels are class indices.
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
    ) -> crate::Result<Self> {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let class_names = (0..n_classes).map(|c| c.to_string()).collect();
        let ds = Dataset {
            features,
            labels,
            class_names,
            feature_names,
            provenance: Provenance::default(),
        };
        ds.check_shape()?;
        Ok(ds)
    }

    /// Like [`Dataset::new`] with names `f0..f{n-1}`.
    pub fn from_rows(features: Vec<Vec<f64>>, labels: Vec<usize>) -> crate::Result<Self> {
        let n = features.first().map_or(0, Vec::len);
        Self::new(features, labels, (0..n).map(|j| format!("f{j}")).collect())
    }

    pub fn n_rows(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[j]).collect()
    }

    /// Labels as reals (class indices), for correlation measures.
    pub fn label_values(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| l as f64).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.features
            .iter()
            .flatten()
            .filter(|v| v.is_nan())
            .count()
    }

    /// Keeps only the listed feature columns, in the given order.
    pub fn select_features(&self, columns: &[usize]) -> Dataset {
        let mut out = self.clone();
        out.features = self
            .features
            .iter()
            .map(|r| columns.iter().map(|&j| r[j]).collect())
            .collect();
        out.feature_names = columns
            .iter()
            .map(|&j| self.feature_names[j].clone())
            .collect();
        out.provenance
            .transforms
            .push(format!("select_features({columns:?})"));
        out
    }

    fn check_shape(&self) -> crate::Result<()> {
        use crate::Error;
        if self.features.len() != self.labels.len() {
            return Err(Error::Data(format!(
                "{} feature rows but {} labels",
                self.features.len(),
                self.labels.len()
            )));
        }
        let n = self.feature_names.len();
        if let Some((i, _)) = self.features.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Data(format!("row {i} does not have {n} features")));
        }
        let mut names = self.feature_names.clone();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Data(format!("duplicate feature name {:?}", w[0])));
        }
        Ok(())
    }
}
