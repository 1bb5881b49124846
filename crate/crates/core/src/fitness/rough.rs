use std::collections::HashMap;

use crate::error::{usage, Result};

/// Discrete decision table: objects (rows) over conditional attributes, plus
/// one decision value per object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoughSetTable {
    objects: Vec<Vec<u32>>,
    decisions: Vec<usize>,
    n_attributes: usize,
}

impl RoughSetTable {
    pub fn new(objects: Vec<Vec<u32>>, decisions: Vec<usize>) -> Result<Self> {
        if objects.is_empty() {
            return usage("decision table needs at least one object");
        }
        if objects.len() != decisions.len() {
            return usage("object and decision counts differ");
        }
        let n_attributes = objects[0].len();
        if objects.iter().any(|o| o.len() != n_attributes) {
            return usage("objects have differing attribute counts");
        }
        Ok(Self {
            objects,
            decisions,
            n_attributes,
        })
    }

    /// Accepts real-valued attributes as long as every value is a
    /// non-negative integer.
    pub fn from_real(values: Vec<Vec<f64>>, decisions: Vec<usize>) -> Result<Self> {
        let objects = values
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| {
                        if v.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&v) {
                            Ok(v as u32)
                        } else {
                            usage(format!(
                                "attribute value {v} is not discrete; discretize first"
                            ))
                        }
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(objects, decisions)
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    pub fn column(&self, a: usize) -> Vec<u32> {
        self.objects.iter().map(|o| o[a]).collect()
    }

    pub fn decisions(&self) -> &[usize] {
        &self.decisions
    }

    pub fn all_attributes(&self) -> Vec<usize> {
        (0..self.n_attributes).collect()
    }
}

/// Dependency degree `|POS_B(D)| / |U|`: the fraction of objects whose
/// indiscernibility class under `attributes` carries a single decision.
pub fn rough_set_dependency(table: &RoughSetTable, attributes: &[usize]) -> Result<f64> {
    if let Some(&a) = attributes.iter().find(|&&a| a >= table.n_attributes) {
        return usage(format!(
            "attribute {a} out of range for {} attributes",
            table.n_attributes
        ));
    }
    // class key -> (first decision, size, consistent)
    let mut classes: HashMap<Vec<u32>, (usize, usize, bool)> = HashMap::new();
    for (obj, &d) in table.objects.iter().zip(&table.decisions) {
        let key: Vec<u32> = attributes.iter().map(|&a| obj[a]).collect();
        let entry = classes.entry(key).or_insert((d, 0, true));
        entry.1 += 1;
        entry.2 &= entry.0 == d;
    }
    let positive: usize = classes
        .values()
        .filter(|(_, _, pure)| *pure)
        .map(|(_, size, _)| size)
        .sum();
    Ok(positive as f64 / table.n_objects() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&[u32], usize)]) -> RoughSetTable {
        RoughSetTable::new(
            rows.iter().map(|(a, _)| a.to_vec()).collect(),
            rows.iter().map(|&(_, d)| d).collect(),
        )
        .unwrap()
    }

    #[test]
    fn worked_example() {
        let t = table(&[(&[0], 0), (&[0], 1), (&[1], 1), (&[1], 1)]);
        assert_eq!(rough_set_dependency(&t, &[0]).unwrap(), 0.5);
    }

    #[test]
    fn full_set_on_consistent_table() {
        let t = table(&[(&[0, 1], 0), (&[1, 1], 1), (&[1, 0], 0)]);
        assert_eq!(rough_set_dependency(&t, &t.all_attributes()).unwrap(), 1.0);
    }

    #[test]
    fn empty_subset() {
        let mixed = table(&[(&[0], 0), (&[1], 1)]);
        assert_eq!(rough_set_dependency(&mixed, &[]).unwrap(), 0.0);
        let uniform = table(&[(&[0], 1), (&[1], 1)]);
        assert_eq!(rough_set_dependency(&uniform, &[]).unwrap(), 1.0);
    }

    #[test]
    fn rejects_non_discrete() {
        assert!(RoughSetTable::from_real(vec![vec![0.5]], vec![0]).is_err());
        assert!(RoughSetTable::from_real(vec![vec![2.0]], vec![0]).is_ok());
        assert!(RoughSetTable::new(vec![], vec![]).is_err());
        let t = table(&[(&[0], 0)]);
        assert!(rough_set_dependency(&t, &[1]).is_err());
    }
}
