use super::Dataset;
use crate::engine::splitmix64;
use crate::error::{usage, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitScheme {
    /// Fraction of rows held out for testing.
    Holdout(f64),
    KFold(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPlan {
    pub scheme: SplitScheme,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitPlan {
    pub fn holdout(test_fraction: f64, seed: u64) -> Self {
        Self {
            scheme: SplitScheme::Holdout(test_fraction),
            seed,
            stratified: true,
        }
    }

    pub fn kfold(k: usize, seed: u64) -> Self {
        Self {
            scheme: SplitScheme::KFold(k),
            seed,
            stratified: true,
        }
    }

    pub fn n_folds(&self) -> usize {
        match self.scheme {
            SplitScheme::Holdout(_) => 2,
            SplitScheme::KFold(k) => k,
        }
    }
}

/// Seeded per-row keys derived from the row's contents, so that ordering by
/// key does not depend on where a row sits in the file.
pub fn row_keys(ds: &Dataset, seed: u64) -> Vec<u64> {
    ds.features
        .iter()
        .zip(&ds.labels)
        .map(|(row, &label)| {
            let mut h = splitmix64(seed ^ 0x5EED);
            for v in row {
                h = splitmix64(h ^ v.to_bits());
            }
            splitmix64(h ^ label as u64)
        })
        .collect()
}

/// Fold assignment per row. For holdout, fold 1 is the test set and fold 0 the
/// training set; for k-fold, rows are spread over folds `0..k`.
pub fn split(ds: &Dataset, plan: &SplitPlan) -> Result<Vec<usize>> {
    let n = ds.n_rows();
    let keys = row_keys(ds, plan.seed);
    let by_key = |rows: &mut Vec<usize>| rows.sort_by_key(|&i| (keys[i], i));

    let groups: Vec<Vec<usize>> = if plan.stratified {
        (0..ds.n_classes())
            .map(|c| {
                let mut rows: Vec<usize> = (0..n).filter(|&i| ds.labels[i] == c).collect();
                by_key(&mut rows);
                rows
            })
            .filter(|rows| !rows.is_empty())
            .collect()
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        by_key(&mut rows);
        vec![rows]
    };

    let mut folds = vec![0usize; n];
    match plan.scheme {
        SplitScheme::Holdout(frac) => {
            if !(frac > 0.0 && frac < 1.0) {
                return usage(format!("holdout fraction {frac} must be in (0, 1)"));
            }
            if n < 2 {
                return Err(Error::Data("holdout needs at least 2 rows".into()));
            }
            let total = ((frac * n as f64).round() as usize).clamp(1, n - 1);
            for (rows, take) in groups.iter().zip(allocate(&groups, frac, total)) {
                for &i in &rows[..take] {
                    folds[i] = 1;
                }
            }
        }
        SplitScheme::KFold(k) => {
            if k < 2 {
                return usage(format!("k-fold needs k >= 2, got {k}"));
            }
            if n < k {
                return Err(Error::Data(format!("{n} rows cannot fill {k} folds")));
            }
            if plan.stratified {
                if let Some(small) = groups.iter().find(|g| g.len() < k) {
                    return Err(Error::Data(format!(
                        "class {:?} has {} rows, fewer than {k} folds",
                        ds.class_names[ds.labels[small[0]]],
                        small.len()
                    )));
                }
            }
            // Round-robin that carries on across classes keeps fold sizes
            // within one row of each other.
            let mut next = 0usize;
            for rows in &groups {
                for &i in rows {
                    folds[i] = next % k;
                    next += 1;
                }
            }
        }
    }
    Ok(folds)
}

/// Largest-remainder allocation of `total` test rows across groups.
fn allocate(groups: &[Vec<usize>], frac: f64, total: usize) -> Vec<usize> {
    let quotas: Vec<f64> = groups.iter().map(|g| g.len() as f64 * frac).collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut remaining = total.saturating_sub(take.iter().sum());
    for &g in order.iter().cycle().take(order.len() * 2) {
        if remaining == 0 {
            break;
        }
        if take[g] < groups[g].len() {
            take[g] += 1;
            remaining -= 1;
        }
    }
    take
}
