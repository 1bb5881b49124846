use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::data::Dataset;
use crate::error::{usage, Result};
use crate::Error;

/// Principal axes of a dataset: `components` is `n x r` with orthonormal
/// columns, variances are non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub components: DMatrix<f64>,
    pub means: Vec<f64>,
    pub explained_variance: Vec<f64>,
}

fn matrix(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j])
}

impl PcaModel {
    /// Fits `r` components. Requires `1 <= r <= min(n_features, n_rows)`.
    pub fn fit(ds: &Dataset, r: usize) -> Result<Self> {
        Self::fit_rows(&ds.features, ds.n_features(), r)
    }

    pub fn fit_rows(rows: &[Vec<f64>], n: usize, r: usize) -> Result<Self> {
        let m = rows.len();
        if r == 0 || r > n.min(m) {
            return usage(format!(
                "PCA component count {r} must be in 1..={}",
                n.min(m)
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data(
                "PCA needs finite data; impute missing values first".into(),
            ));
        }
        let mut x = matrix(rows, n);
        let means: Vec<f64> = (0..n).map(|j| x.column(j).mean()).collect();
        for (j, m) in means.iter().enumerate() {
            x.column_mut(j).add_scalar_mut(-m);
        }
        let svd = x
            .try_svd(false, true, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let dof = (m.max(2) - 1) as f64;
        let mut components = DMatrix::zeros(n, r);
        let mut explained_variance = Vec::with_capacity(r);
        for (c, &k) in order.iter().take(r).enumerate() {
            let mut axis = v_t.row(k).transpose();
            // Fix the sign so the largest-magnitude loading is positive.
            let pivot = axis.iamax();
            if axis[pivot] < 0.0 {
                axis.neg_mut();
            }
            components.set_column(c, &axis);
            let s = svd.singular_values[k];
            explained_variance.push(s * s / dof);
        }
        Ok(Self {
            components,
            means,
            explained_variance,
        })
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn n_components(&self) -> usize {
        self.explained_variance.len()
    }

    /// `(x - means) * components` per row.
    pub fn project(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let n = self.n_features();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return usage(format!(
                "PCA model expects {n} features, got a row with {}",
                bad.len()
            ));
        }
        let mut x = matrix(rows, n);
        for j in 0..n {
            x.column_mut(j).add_scalar_mut(-self.means[j]);
        }
        let z = x * &self.components;
        Ok(z.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    /// Maps projected rows back to the original space.
    pub fn inverse(&self, projected: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let r = self.n_components();
        if let Some(bad) = projected.iter().find(|p| p.len() != r) {
            return usage(format!(
                "expected {r} components per row, got {}",
                bad.len()
            ));
        }
        let z = matrix(projected, r);
        let x = z * self.components.transpose();
        Ok(x.row_iter()
            .map(|row| row.iter().zip(&self.means).map(|(v, m)| v + m).collect())
            .collect())
    }

    /// Projected dataset with columns `pc0..`; labels are kept.
    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        let mut out = ds.clone();
        out.features = self.project(&ds.features)?;
        out.feature_names = (0..self.n_components()).map(|c| format!("pc{c}")).collect();
        out.provenance
            .transforms
            .push(format!("pca({})", self.n_components()));
        Ok(out)
    }

    /// Plain text: `n r`, the means, `n` component rows, then the variances.
    pub fn to_text(&self) -> String {
        let join = |v: &mut dyn Iterator<Item = f64>| {
            v.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
        };
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n_features(), self.n_components());
        let _ = writeln!(s, "{}", join(&mut self.means.iter().copied()));
        for row in self.components.row_iter() {
            let _ = writeln!(s, "{}", join(&mut row.iter().copied()));
        }
        let _ = writeln!(s, "{}", join(&mut self.explained_variance.iter().copied()));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Data(format!("malformed PCA model: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut numbers = |expect: usize, what: &str| -> Result<Vec<f64>> {
            let line = lines
                .next()
                .ok_or_else(|| bad(&format!("missing {what}")))?;
            let v = line
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(&format!("{what}: {e}")))?;
            if v.len() != expect {
                return Err(bad(&format!(
                    "{what} has {} values, expected {expect}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let header = numbers(2, "header")?;
        let (n, r) = (header[0] as usize, header[1] as usize);
        let means = numbers(n, "means")?;
        let mut comp = Vec::with_capacity(n * r);
        for i in 0..n {
            comp.extend(numbers(r, &format!("component row {i}"))?);
        }
        let explained_variance = numbers(r, "variances")?;
        Ok(Self {
            components: DMatrix::from_row_slice(n, r, &comp),
            means,
            explained_variance,
        })
    }
}
