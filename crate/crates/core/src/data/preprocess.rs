use super::Dataset;
use crate::error::{usage, Error, Result};
use crate::fitness::RoughSetTable;

/// Replaces each missing cell by its column's observed mean.
pub fn impute_missing(ds: &Dataset) -> Result<Dataset> {
    let mut out = ds.clone();
    let mut filled = 0usize;
    for j in 0..ds.n_features() {
        let observed: Vec<f64> = ds
            .features
            .iter()
            .map(|r| r[j])
            .filter(|v| !v.is_nan())
            .collect();
        if observed.len() == ds.n_rows() {
            continue;
        }
        if observed.is_empty() {
            return Err(Error::Data(format!(
                "column {:?} has no observed values",
                ds.feature_names[j]
            )));
        }
        let mean = observed.iter().sum::<f64>() / observed.len() as f64;
        for row in &mut out.features {
            if row[j].is_nan() {
                row[j] = mean;
                filled += 1;
            }
        }
    }
    out.provenance
        .transforms
        .push(format!("impute_missing(mean, filled={filled})"));
    Ok(out)
}

/// Maps every column to [0, 1] via `(x - min) / (max - min)`; constant
/// columns become 0.5.
pub fn normalize_minmax(ds: &Dataset) -> Dataset {
    let mut out = ds.clone();
    for j in 0..ds.n_features() {
        let (lo, hi) = ds
            .features
            .iter()
            .map(|r| r[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let range = hi - lo;
        for row in &mut out.features {
            row[j] = if range > 0.0 {
                ((row[j] - lo) / range).clamp(0.0, 1.0)
            } else {
                0.5
            };
        }
    }
    out.provenance.transforms.push("normalize_minmax".into());
    out
}

/// Bins each feature as `floor(x * bins)`, clamped to `0..bins`. Expects
/// normalized features.
pub fn discretize_equal_width(ds: &Dataset, bins: usize) -> Result<RoughSetTable> {
    if bins < 2 {
        return usage(format!("need at least 2 bins, got {bins}"));
    }
    if ds.missing_count() > 0 {
        return usage("discretize after imputing missing values");
    }
    let max_bin = (bins - 1) as u32;
    let objects = ds
        .features
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| ((x * bins as f64).floor().max(0.0) as u32).min(max_bin))
                .collect()
        })
        .collect();
    RoughSetTable::new(objects, ds.labels.clone())
}

/// The standard pipeline: impute then normalize.
pub fn prepare(ds: &Dataset) -> Result<Dataset> {
    Ok(normalize_minmax(&impute_missing(ds)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_column(values: Vec<f64>) -> Dataset {
        let n = values.len();
        Dataset::from_rows(values.into_iter().map(|v| vec![v]).collect(), vec![0; n]).unwrap()
    }

    #[test]
    fn mean_imputation() {
        let ds = single_column(vec![1.0, f64::NAN, 3.0]);
        let out = impute_missing(&ds).unwrap();
        assert_eq!(out.column(0), vec![1.0, 2.0, 3.0]);
        assert_eq!(out.missing_count(), 0);
    }

    #[test]
    fn imputation_noop_and_error() {
        let ds = single_column(vec![1.0, 2.0]);
        assert_eq!(impute_missing(&ds).unwrap().features, ds.features);
        let bad = single_column(vec![f64::NAN, f64::NAN]);
        let err = impute_missing(&bad).unwrap_err();
        assert!(err.to_string().contains("f0"));
    }

    #[test]
    fn minmax() {
        assert_eq!(
            normalize_minmax(&single_column(vec![2.0, 4.0, 6.0])).column(0),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            normalize_minmax(&single_column(vec![7.0, 7.0])).column(0),
            vec![0.5, 0.5]
        );
        let once = normalize_minmax(&single_column(vec![3.0, -1.0, 9.5, 0.25]));
        assert_eq!(normalize_minmax(&once).features, once.features);
    }

    #[test]
    fn equal_width_bins() {
        let t = discretize_equal_width(&single_column(vec![0.0, 0.49, 0.5, 1.0]), 2).unwrap();
        assert_eq!(t.column(0), vec![0, 0, 1, 1]);
        let t = discretize_equal_width(&single_column(vec![1.0]), 5).unwrap();
        assert_eq!(t.column(0), vec![4]);
        let t = discretize_equal_width(&single_column(vec![0.5; 4]), 5).unwrap();
        assert!(t.column(0).iter().all(|&b| b == 2));
        assert!(discretize_equal_width(&single_column(vec![0.5]), 1).is_err());
    }

    #[test]
    fn transform_log_is_ordered() {
        let ds = prepare(&single_column(vec![1.0, f64::NAN, 5.0])).unwrap();
        assert_eq!(ds.provenance.transforms.len(), 2);
        assert!(ds.provenance.transforms[0].starts_with("impute_missing"));
        assert_eq!(ds.provenance.transforms[1], "normalize_minmax");
        assert!(ds
            .features
            .iter()
            .flatten()
            .all(|v| (0.0..=1.0).contains(v)));
    }
}
