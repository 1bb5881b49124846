use crate::error::{usage, Result};

/// Absolute Pearson correlation between a feature and the class index
/// (point-biserial for two classes). Constant inputs score 0.
pub fn filter_score(column: &[f64], labels: &[f64]) -> Result<f64> {
    if column.len() != labels.len() {
        return usage(format!(
            "column has {} values but there are {} labels",
            column.len(),
            labels.len()
        ));
    }
    if column.len() < 2 {
        return usage("filter score needs at least two rows");
    }
    let n = column.len() as f64;
    let mx = column.iter().sum::<f64>() / n;
    let my = labels.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in column.iter().zip(labels) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0) || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).abs().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_constant() {
        let y = [0.0, 1.0, 1.0, 0.0, 1.0];
        assert!((filter_score(&y, &y).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(filter_score(&[3.0; 5], &y).unwrap(), 0.0);
        let flipped: Vec<f64> = y.iter().map(|v| 1.0 - v).collect();
        assert!((filter_score(&flipped, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(filter_score(&[1.0, 2.0], &[1.0]).is_err());
        assert!(filter_score(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn affine_invariance() {
        let x = [0.3, 1.2, -0.7, 2.2, 0.0, 0.9];
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let base = filter_score(&x, &y).unwrap();
        for (a, b) in [(2.0, 1.0), (-3.5, 10.0), (0.01, -4.0)] {
            let t: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            assert!((filter_score(&t, &y).unwrap() - base).abs() < 1e-12);
        }
    }
}
