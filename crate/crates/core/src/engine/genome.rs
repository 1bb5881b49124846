use rand::seq::index::sample;
use rand::Rng;

use super::RngStream;
use crate::error::{usage, Result};

/// A candidate feature subset.
///
/// `BinaryMask` carries one bit per feature. `IntegerSubset` carries a
/// fixed-length list of distinct feature indices out of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Genome {
    BinaryMask(Vec<bool>),
    IntegerSubset { indices: Vec<usize>, n: usize },
}

impl Genome {
    pub fn from_mask(mask: Vec<bool>) -> Self {
        Genome::BinaryMask(mask)
    }

    pub fn from_indices(indices: Vec<usize>, n: usize) -> Result<Self> {
        let g = Genome::IntegerSubset { indices, n };
        g.validate()?;
        Ok(g)
    }

    /// Parses a `0`/`1` string into a mask.
    pub fn parse_mask(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => usage(format!("invalid mask character {other:?}")),
            })
            .collect::<Result<Vec<_>>>()
            .map(Genome::BinaryMask)
    }

    /// Total feature count `n`.
    pub fn n_features(&self) -> usize {
        match self {
            Genome::BinaryMask(m) => m.len(),
            Genome::IntegerSubset { n, .. } => *n,
        }
    }

    /// Number of genes (mask length, or subset length `m`).
    pub fn len(&self) -> usize {
        match self {
            Genome::BinaryMask(m) => m.len(),
            Genome::IntegerSubset { indices, .. } => indices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, Genome::BinaryMask(_))
    }

    /// Selected feature indices in ascending order.
    pub fn decode(&self) -> Vec<usize> {
        match self {
            Genome::BinaryMask(m) => m
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
            Genome::IntegerSubset { indices, .. } => {
                let mut v = indices.clone();
                v.sort_unstable();
                v
            }
        }
    }

    pub fn to_mask(&self) -> Vec<bool> {
        match self {
            Genome::BinaryMask(m) => m.clone(),
            Genome::IntegerSubset { indices, n } => {
                let mut mask = vec![false; *n];
                for &i in indices {
                    mask[i] = true;
                }
                mask
            }
        }
    }

    pub fn selected_count(&self) -> usize {
        match self {
            Genome::BinaryMask(m) => m.iter().filter(|&&b| b).count(),
            Genome::IntegerSubset { indices, .. } => indices.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Genome::BinaryMask(_) => Ok(()),
            Genome::IntegerSubset { indices, n } => {
                if indices.len() > *n {
                    return usage(format!("subset length {} exceeds n = {n}", indices.len()));
                }
                let mut seen = vec![false; *n];
                for &i in indices {
                    if i >= *n {
                        return usage(format!("index {i} out of range for n = {n}"));
                    }
                    if seen[i] {
                        return usage(format!("duplicate index {i}"));
                    }
                    seen[i] = true;
                }
                Ok(())
            }
        }
    }

    /// Random mask with i.i.d. Bernoulli(0.5) bits; all-zero draws are
    /// rejected and redrawn.
    pub fn random_mask(n: usize, rng: &mut RngStream) -> Self {
        assert!(n > 0, "random_mask needs at least one feature");
        loop {
            let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            if mask.iter().any(|&b| b) {
                return Genome::BinaryMask(mask);
            }
        }
    }

    /// `m` distinct indices drawn without replacement from `0..n`.
    pub fn random_subset(n: usize, m: usize, rng: &mut RngStream) -> Result<Self> {
        if m == 0 || m > n {
            return usage(format!("subset length must be in 1..={n}, got {m}"));
        }
        let indices = sample(rng, n, m).into_vec();
        Ok(Genome::IntegerSubset { indices, n })
    }

    /// Renders a mask as a `0`/`1` string (IntegerSubset renders its mask).
    pub fn bit_string(&self) -> String {
        self.to_mask()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_decodes_to_set_bits() {
        let g = Genome::parse_mask("01101").unwrap();
        assert_eq!(g.decode(), vec![1, 2, 4]);
        assert_eq!(g.selected_count(), 3);
        assert_eq!(g.bit_string(), "01101");
    }

    #[test]
    fn subset_validation() {
        assert!(Genome::from_indices(vec![0, 3, 1], 4).is_ok());
        assert!(Genome::from_indices(vec![0, 0], 4).is_err());
        assert!(Genome::from_indices(vec![4], 4).is_err());
        let g = Genome::from_indices(vec![3, 0], 4).unwrap();
        assert_eq!(g.to_mask(), vec![true, false, false, true]);
        assert_eq!(g.decode(), vec![0, 3]);
    }

    #[test]
    fn random_mask_never_empty() {
        let mut rng = RngStream::new(3);
        for _ in 0..500 {
            assert!(Genome::random_mask(2, &mut rng).selected_count() > 0);
        }
    }

    #[test]
    fn random_subset_distinct() {
        let mut rng = RngStream::new(5);
        for _ in 0..100 {
            let g = Genome::random_subset(10, 4, &mut rng).unwrap();
            g.validate().unwrap();
            assert_eq!(g.len(), 4);
        }
        assert!(Genome::random_subset(3, 4, &mut rng).is_err());
    }
}
