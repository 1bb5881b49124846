//! Synthetic dataset with a known best subset, for checking optimizers
//! against exhaustive search.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use evofs_core::data::{load_csv, prepare, write_csv, Dataset, LoadOptions};
use evofs_core::engine::{Fitness, RngStream};
use evofs_core::fitness::{FitnessSpec, SubsetEvaluator};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::output::write_atomic;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSpec {
    pub n_features: usize,
    pub informative: usize,
    pub rows: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            n_features: 12,
            informative: 4,
            rows: 200,
            noise_sd: 0.1,
            seed: 0,
        }
    }
}

/// Exhaustive-search result stored next to the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptimum {
    pub fitness: f64,
    pub mask: Vec<bool>,
}

/// Features are U(0, 1); the label is 1 when the sum of `x_j - 0.5` over the
/// first `informative` columns plus N(0, noise_sd) noise is positive.
pub fn oracle_dataset(spec: &OracleSpec) -> Result<Dataset, CliError> {
    if spec.informative >= spec.n_features {
        return Err(CliError::Usage(format!(
            "informative features ({}) must be fewer than features ({})",
            spec.informative, spec.n_features
        )));
    }
    if spec.rows < 2 {
        return Err(CliError::Usage(
            "oracle dataset needs at least 2 rows".into(),
        ));
    }
    let mut rng = RngStream::new(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sd)
        .map_err(|e| CliError::Usage(format!("noise level: {e}")))?;
    let mut rows = Vec::with_capacity(spec.rows);
    let mut labels = Vec::with_capacity(spec.rows);
    for _ in 0..spec.rows {
        let row: Vec<f64> = (0..spec.n_features).map(|_| rng.random::<f64>()).collect();
        let score: f64 =
            row[..spec.informative].iter().map(|x| x - 0.5).sum::<f64>() + noise.sample(&mut rng);
        labels.push(usize::from(score > 0.0));
        rows.push(row);
    }
    Ok(Dataset::from_rows(rows, labels)?)
}

/// Best objective value over every non-empty mask.
pub fn brute_force_optimum(evaluator: &dyn Fitness) -> OracleOptimum {
    let n = evaluator.n_features();
    let mut best = OracleOptimum {
        fitness: f64::NEG_INFINITY,
        mask: vec![true; n],
    };
    for code in 1u64..(1u64 << n) {
        let mask: Vec<bool> = (0..n).map(|j| code >> j & 1 == 1).collect();
        let f = evaluator.evaluate(&mask);
        if f > best.fitness {
            best = OracleOptimum { fitness: f, mask };
        }
    }
    best
}

/// Path of the optimum file that accompanies `csv`.
pub fn optimum_path(csv: &Path) -> PathBuf {
    csv.with_extension("optimum")
}

/// Writes the dataset to `csv` and the exhaustive optimum under `fitness`
/// beside it. The optimum is computed on the file as reloaded and prepared,
/// which is exactly what an experiment sees.
pub fn generate_oracle_dataset(
    csv: &Path,
    spec: &OracleSpec,
    fitness: &FitnessSpec,
) -> Result<OracleOptimum, CliError> {
    if spec.n_features > 20 {
        return Err(CliError::Usage(
            "exhaustive search is limited to 20 features".into(),
        ));
    }
    let ds = oracle_dataset(spec)?;
    let mut buf = Vec::new();
    write_csv(&ds, &mut buf).map_err(|e| CliError::io(csv, e))?;
    write_atomic(csv, &buf)?;

    let loaded = prepare(&load_csv(csv, &LoadOptions::default())?)?;
    let evaluator = SubsetEvaluator::new(Arc::new(loaded), *fitness)?;
    let optimum = brute_force_optimum(&evaluator);
    let bits: String = optimum
        .mask
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    let text = format!(
        "optimum = {:?}\nbest_mask = {bits}\ninformative = {}\nseed = {}\n",
        optimum.fitness, spec.informative, spec.seed
    );
    write_atomic(&optimum_path(csv), text.as_bytes())?;
    Ok(optimum)
}

/// Reads the `optimum` value from a stored optimum file.
pub fn read_optimum(path: &Path) -> Result<f64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == "optimum")
        .and_then(|(_, v)| v.trim().parse().ok())
        .ok_or_else(|| CliError::Usage(format!("{} has no optimum entry", path.display())))
}
