use rand::seq::index::sample;
use rand::Rng;

use super::{Genome, RngStream};
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    KPoint(usize),
    Uniform,
    /// Blend of continuous vectors; not applicable to genomes.
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationSpec {
    pub crossover: Crossover,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
}

impl Default for VariationSpec {
    fn default() -> Self {
        Self {
            crossover: Crossover::Uniform,
            mutation_rate: 0.1,
        }
    }
}

impl VariationSpec {
    pub fn validate(&self, genome_len: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return usage(format!(
                "mutation rate {} outside [0, 1]",
                self.mutation_rate
            ));
        }
        if let Crossover::KPoint(k) = self.crossover {
            if k == 0 || k >= genome_len {
                return usage(format!(
                    "k-point crossover needs 1 <= k < {genome_len}, got {k}"
                ));
            }
        }
        Ok(())
    }
}

/// Recombines two parents into two children.
pub fn crossover(
    a: &Genome,
    b: &Genome,
    spec: &VariationSpec,
    rng: &mut RngStream,
) -> Result<(Genome, Genome)> {
    check_compatible(a, b)?;
    spec.validate(a.len())?;
    match spec.crossover {
        Crossover::Arithmetic => usage("arithmetic crossover applies to continuous vectors only"),
        Crossover::KPoint(k) => {
            let mut cuts = sample(rng, a.len() - 1, k).into_vec();
            for c in &mut cuts {
                *c += 1;
            }
            k_point_crossover_at(a, b, &cuts, rng)
        }
        Crossover::Uniform => {
            let picks: Vec<bool> = (0..a.len()).map(|_| rng.random_bool(0.5)).collect();
            match (a, b) {
                (Genome::BinaryMask(x), Genome::BinaryMask(y)) => {
                    let (c1, c2) = swap_where(x, y, &picks);
                    Ok((Genome::BinaryMask(c1), Genome::BinaryMask(c2)))
                }
                (
                    Genome::IntegerSubset { indices: x, n },
                    Genome::IntegerSubset { indices: y, .. },
                ) => {
                    let (c1, c2) = swap_where(x, y, &picks);
                    Ok((repair_subset(c1, *n, rng), repair_subset(c2, *n, rng)))
                }
                _ => unreachable!("checked by check_compatible"),
            }
        }
    }
}

/// K-point crossover with explicit cut positions. A cut at `p` splits the
/// genes before index `p` from those at and after it.
pub fn k_point_crossover_at(
    a: &Genome,
    b: &Genome,
    cuts: &[usize],
    rng: &mut RngStream,
) -> Result<(Genome, Genome)> {
    check_compatible(a, b)?;
    let len = a.len();
    if cuts.iter().any(|&c| c == 0 || c >= len) {
        return usage(format!("cut positions must lie in 1..{len}"));
    }
    let mut sorted = cuts.to_vec();
    sorted.sort_unstable();
    // picks[i] = true where child 1 takes parent b's gene.
    let mut picks = vec![false; len];
    let mut from_b = false;
    let mut next_cut = sorted.iter().peekable();
    for (i, p) in picks.iter_mut().enumerate() {
        while next_cut.peek() == Some(&&i) {
            from_b = !from_b;
            next_cut.next();
        }
        *p = from_b;
    }
    match (a, b) {
        (Genome::BinaryMask(x), Genome::BinaryMask(y)) => {
            let (c1, c2) = swap_where(x, y, &picks);
            Ok((Genome::BinaryMask(c1), Genome::BinaryMask(c2)))
        }
        (Genome::IntegerSubset { indices: x, n }, Genome::IntegerSubset { indices: y, .. }) => {
            let (c1, c2) = swap_where(x, y, &picks);
            Ok((repair_subset(c1, *n, rng), repair_subset(c2, *n, rng)))
        }
        _ => unreachable!("checked by check_compatible"),
    }
}

/// `child = lambda * a + (1 - lambda) * b` and its mirror, with lambda
/// uniform in [0, 1].
pub fn arithmetic_crossover(
    a: &[f64],
    b: &[f64],
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.len() != b.len() {
        return usage("arithmetic crossover on vectors of different length");
    }
    let lambda: f64 = rng.random();
    let c1 = a
        .iter()
        .zip(b)
        .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
        .collect();
    let c2 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (1.0 - lambda) * x + lambda * y)
        .collect();
    Ok((c1, c2))
}

/// Per-gene mutation at `spec.mutation_rate`: bit flips for masks, resampling
/// to an unused index for subsets.
pub fn mutate(g: &Genome, spec: &VariationSpec, rng: &mut RngStream) -> Result<Genome> {
    g.validate()?;
    spec.validate(g.len().max(2))?;
    let rate = spec.mutation_rate;
    Ok(match g {
        Genome::BinaryMask(m) => Genome::BinaryMask(
            m.iter()
                .map(|&bit| if rng.random_bool(rate) { !bit } else { bit })
                .collect(),
        ),
        Genome::IntegerSubset { indices, n } => {
            let mut out = indices.clone();
            let mut used = vec![false; *n];
            for &i in &out {
                used[i] = true;
            }
            for slot in 0..out.len() {
                if !rng.random_bool(rate) {
                    continue;
                }
                let free: Vec<usize> = (0..*n).filter(|&i| !used[i]).collect();
                if free.is_empty() {
                    break;
                }
                let pick = free[rng.random_range(0..free.len())];
                used[out[slot]] = false;
                used[pick] = true;
                out[slot] = pick;
            }
            Genome::IntegerSubset {
                indices: out,
                n: *n,
            }
        }
    })
}

fn check_compatible(a: &Genome, b: &Genome) -> Result<()> {
    match (a, b) {
        (Genome::BinaryMask(x), Genome::BinaryMask(y)) if x.len() == y.len() => Ok(()),
        (
            Genome::IntegerSubset { indices: x, n: nx },
            Genome::IntegerSubset { indices: y, n: ny },
        ) if x.len() == y.len() && nx == ny => Ok(()),
        _ => usage("crossover parents differ in encoding or length"),
    }
}

fn swap_where<T: Copy>(x: &[T], y: &[T], picks: &[bool]) -> (Vec<T>, Vec<T>) {
    x.iter()
        .zip(y)
        .zip(picks)
        .map(|((&a, &b), &swap)| if swap { (b, a) } else { (a, b) })
        .unzip()
}

/// Replaces repeated indices (second and later occurrences) by indices drawn
/// uniformly from those not yet present.
fn repair_subset(mut indices: Vec<usize>, n: usize, rng: &mut RngStream) -> Genome {
    let mut used = vec![false; n];
    let mut dup_slots = Vec::new();
    for (slot, &i) in indices.iter().enumerate() {
        if used[i] {
            dup_slots.push(slot);
        } else {
            used[i] = true;
        }
    }
    for slot in dup_slots {
        let free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        let pick = free[rng.random_range(0..free.len())];
        used[pick] = true;
        indices[slot] = pick;
    }
    Genome::IntegerSubset { indices, n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mask(s: &str) -> Genome {
        Genome::parse_mask(s).unwrap()
    }

    #[test]
    fn one_point_known_cut() {
        let mut rng = RngStream::new(0);
        let (c1, c2) =
            k_point_crossover_at(&mask("10101"), &mask("01010"), &[2], &mut rng).unwrap();
        assert_eq!(c1.bit_string(), "10010");
        assert_eq!(c2.bit_string(), "01101");
    }

    #[test]
    fn two_point_alternates_segments() {
        let mut rng = RngStream::new(0);
        let (c1, c2) =
            k_point_crossover_at(&mask("111111"), &mask("000000"), &[2, 4], &mut rng).unwrap();
        assert_eq!(c1.bit_string(), "110011");
        assert_eq!(c2.bit_string(), "001100");
    }

    #[test]
    fn identical_parents_reproduce() {
        let mut rng = RngStream::new(4);
        let p = mask("1100101");
        for crossover in [
            Crossover::KPoint(1),
            Crossover::KPoint(3),
            Crossover::Uniform,
        ] {
            let spec = VariationSpec {
                crossover,
                mutation_rate: 0.0,
            };
            let (c1, c2) = crossover_pair(&p, &p, &spec, &mut rng);
            assert_eq!(c1, p);
            assert_eq!(c2, p);
        }
    }

    fn crossover_pair(
        a: &Genome,
        b: &Genome,
        s: &VariationSpec,
        r: &mut RngStream,
    ) -> (Genome, Genome) {
        crossover(a, b, s, r).unwrap()
    }

    #[test]
    fn errors() {
        let mut rng = RngStream::new(0);
        let spec = VariationSpec::default();
        assert!(crossover(&mask("101"), &mask("10"), &spec, &mut rng).is_err());
        let arith = VariationSpec {
            crossover: Crossover::Arithmetic,
            mutation_rate: 0.1,
        };
        assert!(crossover(&mask("101"), &mask("100"), &arith, &mut rng).is_err());
        let bad_k = VariationSpec {
            crossover: Crossover::KPoint(3),
            mutation_rate: 0.1,
        };
        assert!(crossover(&mask("101"), &mask("100"), &bad_k, &mut rng).is_err());
        let subset = Genome::from_indices(vec![0, 1], 4).unwrap();
        assert!(crossover(&mask("10"), &subset, &spec, &mut rng).is_err());
    }

    #[test]
    fn uniform_rate_is_half() {
        let mut rng = RngStream::new(17);
        let spec = VariationSpec {
            crossover: Crossover::Uniform,
            mutation_rate: 0.0,
        };
        let trials = 10_000;
        let mut ones = [0usize; 5];
        for _ in 0..trials {
            let (c1, _) = crossover(&mask("11111"), &mask("00000"), &spec, &mut rng).unwrap();
            for (i, b) in c1.to_mask().into_iter().enumerate() {
                ones[i] += b as usize;
            }
        }
        for o in ones {
            assert!((o as f64 / trials as f64 - 0.5).abs() <= 0.02);
        }
    }

    #[test]
    fn mutation_extremes() {
        let mut rng = RngStream::new(1);
        let g = mask("1100101");
        let none = VariationSpec {
            crossover: Crossover::Uniform,
            mutation_rate: 0.0,
        };
        assert_eq!(mutate(&g, &none, &mut rng).unwrap(), g);
        let all = VariationSpec {
            mutation_rate: 1.0,
            ..none
        };
        assert_eq!(mutate(&g, &all, &mut rng).unwrap().bit_string(), "0011010");
    }

    #[test]
    fn mutation_flip_count_is_binomial() {
        let mut rng = RngStream::new(23);
        let spec = VariationSpec {
            crossover: Crossover::Uniform,
            mutation_rate: 0.1,
        };
        let g = Genome::BinaryMask(vec![false; 100]);
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|_| mutate(&g, &spec, &mut rng).unwrap().selected_count())
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((mean - 10.0).abs() <= 0.3, "mean {mean}");
    }

    #[test]
    fn arithmetic_blend() {
        let mut rng = RngStream::new(2);
        let (c1, c2) = arithmetic_crossover(&[0.0, 1.0], &[1.0, 1.0], &mut rng).unwrap();
        assert!((c1[0] + c2[0] - 1.0).abs() < 1e-15);
        assert_eq!(c1[1], 1.0);
        assert!(arithmetic_crossover(&[0.0], &[1.0, 2.0], &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn operators_preserve_genome_invariants(
            seed in any::<u64>(),
            n in 2usize..16,
            m_frac in 0.1f64..1.0,
            rate in 0.0f64..=1.0,
            uniform in any::<bool>(),
        ) {
            let mut rng = RngStream::new(seed);
            let m = ((n as f64 * m_frac).ceil() as usize).clamp(2, n);
            let crossover_kind = if uniform { Crossover::Uniform } else { Crossover::KPoint(1) };
            let spec = VariationSpec { crossover: crossover_kind, mutation_rate: rate };
            let a = Genome::random_subset(n, m, &mut rng).unwrap();
            let b = Genome::random_subset(n, m, &mut rng).unwrap();
            let (c1, c2) = crossover(&a, &b, &spec, &mut rng).unwrap();
            for c in [&c1, &c2] {
                prop_assert!(c.validate().is_ok());
                prop_assert_eq!(c.len(), m);
                let mutated = mutate(c, &spec, &mut rng).unwrap();
                prop_assert!(mutated.validate().is_ok());
                prop_assert!(mutated.selected_count() <= n);
            }
            let x = Genome::random_mask(n, &mut rng);
            let y = Genome::random_mask(n, &mut rng);
            let (d1, d2) = crossover(&x, &y, &spec, &mut rng).unwrap();
            prop_assert_eq!(d1.len(), n);
            // Column conservation: each position's child genes permute the parents'.
            let (xm, ym, m1, m2) = (x.to_mask(), y.to_mask(), d1.to_mask(), d2.to_mask());
            for i in 0..n {
                let mut parents = [xm[i], ym[i]];
                let mut kids = [m1[i], m2[i]];
                parents.sort();
                kids.sort();
                prop_assert_eq!(parents, kids);
            }
        }
    }
}
