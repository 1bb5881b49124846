use std::fmt;

use rand::Rng;

use crate::data::{normalize_minmax, Dataset};
use crate::engine::{argmax, RngStream};
use crate::error::{usage, Result};
use crate::fitness::filter_score;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Sin,
    Cos,
    Tan,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    /// Protected division: 1 when the denominator is near zero.
    Div,
}

const UNARY: [UnaryOp; 4] = [UnaryOp::Sin, UnaryOp::Cos, UnaryOp::Tan, UnaryOp::Square];
const BINARY: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];
const DIV_GUARD: f64 = 1e-9;

impl UnaryOp {
    fn apply(self, x: f64) -> f64 {
        match self {
            UnaryOp::Sin => x.sin(),
            UnaryOp::Cos => x.cos(),
            UnaryOp::Tan => x.tan(),
            UnaryOp::Square => x * x,
        }
    }
}

impl BinaryOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => {
                if b.abs() < DIV_GUARD {
                    1.0
                } else {
                    a / b
                }
            }
        }
    }
}

/// Expression over feature variables and constants. Depth counts edges, so a
/// single terminal has depth 0.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprTree {
    Var(usize),
    Const(f64),
    Unary(UnaryOp, Box<ExprTree>),
    Binary(BinaryOp, Box<ExprTree>, Box<ExprTree>),
}

impl ExprTree {
    pub fn unary(op: UnaryOp, a: ExprTree) -> Self {
        ExprTree::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: ExprTree, b: ExprTree) -> Self {
        ExprTree::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprTree::Var(_) | ExprTree::Const(_) => 0,
            ExprTree::Unary(_, a) => 1 + a.depth(),
            ExprTree::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ExprTree::Var(_) | ExprTree::Const(_) => 1,
            ExprTree::Unary(_, a) => 1 + a.node_count(),
            ExprTree::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            ExprTree::Var(i) => Some(*i),
            ExprTree::Const(_) => None,
            ExprTree::Unary(_, a) => a.max_var(),
            ExprTree::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Node `index` in preorder.
    pub fn subtree(&self, index: usize) -> Option<&ExprTree> {
        if index == 0 {
            return Some(self);
        }
        match self {
            ExprTree::Var(_) | ExprTree::Const(_) => None,
            ExprTree::Unary(_, a) => a.subtree(index - 1),
            ExprTree::Binary(_, a, b) => {
                let left = a.node_count();
                if index <= left {
                    a.subtree(index - 1)
                } else {
                    b.subtree(index - 1 - left)
                }
            }
        }
    }

    fn subtree_mut(&mut self, index: usize) -> Option<&mut ExprTree> {
        if index == 0 {
            return Some(self);
        }
        match self {
            ExprTree::Var(_) | ExprTree::Const(_) => None,
            ExprTree::Unary(_, a) => a.subtree_mut(index - 1),
            ExprTree::Binary(_, a, b) => {
                let left = a.node_count();
                if index <= left {
                    a.subtree_mut(index - 1)
                } else {
                    b.subtree_mut(index - 1 - left)
                }
            }
        }
    }

    /// Copy with the subtree at preorder `index` replaced.
    pub fn with_subtree(&self, index: usize, replacement: ExprTree) -> Option<ExprTree> {
        let mut out = self.clone();
        *out.subtree_mut(index)? = replacement;
        Some(out)
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprTree::Var(i) => write!(f, "x{i}"),
            ExprTree::Const(c) => write!(f, "{c:.4}"),
            ExprTree::Unary(op, a) => {
                let name = match op {
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Tan => "tan",
                    UnaryOp::Square => "sq",
                };
                write!(f, "{name}({a})")
            }
            ExprTree::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}

fn finite_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

/// Evaluates `tree` on one row. Non-finite intermediate values become 0.
pub fn gp_eval(tree: &ExprTree, row: &[f64]) -> Result<f64> {
    Ok(finite_or_zero(match tree {
        ExprTree::Var(i) => match row.get(*i) {
            Some(&v) => v,
            None => {
                return usage(format!(
                    "variable x{i} is not bound (row has {} values)",
                    row.len()
                ))
            }
        },
        ExprTree::Const(c) => *c,
        ExprTree::Unary(op, a) => op.apply(gp_eval(a, row)?),
        ExprTree::Binary(op, a, b) => op.apply(gp_eval(a, row)?, gp_eval(b, row)?),
    }))
}

fn random_terminal(n_vars: usize, rng: &mut RngStream) -> ExprTree {
    if n_vars > 0 && rng.random_bool(0.75) {
        ExprTree::Var(rng.random_range(0..n_vars))
    } else {
        ExprTree::Const(rng.random_range(-1.0..=1.0))
    }
}

/// Random tree of at most `depth`; `full` forces every branch to that depth.
pub fn gp_random_tree(n_vars: usize, depth: usize, full: bool, rng: &mut RngStream) -> ExprTree {
    if depth == 0 {
        return random_terminal(n_vars, rng);
    }
    // Grow stops early with the terminal share of the primitive set.
    if !full && rng.random_bool(0.3) {
        return random_terminal(n_vars, rng);
    }
    if rng.random_bool(0.5) {
        let op = UNARY[rng.random_range(0..UNARY.len())];
        ExprTree::unary(op, gp_random_tree(n_vars, depth - 1, full, rng))
    } else {
        let op = BINARY[rng.random_range(0..BINARY.len())];
        let a = gp_random_tree(n_vars, depth - 1, full, rng);
        let b = gp_random_tree(n_vars, depth - 1, full, rng);
        ExprTree::binary(op, a, b)
    }
}

/// Ramped half-and-half: depths cycle over `min_depth..=max_depth`,
/// alternating full and grow.
pub fn gp_ramped_half_and_half(
    size: usize,
    n_vars: usize,
    min_depth: usize,
    max_depth: usize,
    rng: &mut RngStream,
) -> Vec<ExprTree> {
    let span = max_depth.saturating_sub(min_depth) + 1;
    (0..size)
        .map(|i| gp_random_tree(n_vars, min_depth + (i / 2) % span, i % 2 == 0, rng))
        .collect()
}

/// Swaps the subtrees at preorder positions `i` (in `a`) and `j` (in `b`).
/// A child deeper than `max_depth` is replaced by its unmodified parent.
pub fn swap_subtrees(
    a: &ExprTree,
    b: &ExprTree,
    i: usize,
    j: usize,
    max_depth: usize,
) -> Option<(ExprTree, ExprTree)> {
    let sa = a.subtree(i)?.clone();
    let sb = b.subtree(j)?.clone();
    let ca = a.with_subtree(i, sb)?;
    let cb = b.with_subtree(j, sa)?;
    let ca = if ca.depth() > max_depth {
        a.clone()
    } else {
        ca
    };
    let cb = if cb.depth() > max_depth {
        b.clone()
    } else {
        cb
    };
    Some((ca, cb))
}

pub fn gp_subtree_crossover(
    a: &ExprTree,
    b: &ExprTree,
    max_depth: usize,
    rng: &mut RngStream,
) -> (ExprTree, ExprTree) {
    let i = rng.random_range(0..a.node_count());
    let j = rng.random_range(0..b.node_count());
    swap_subtrees(a, b, i, j, max_depth).expect("indices within node counts")
}

/// Changes one node's symbol while keeping its arity, so depth is unchanged.
pub fn gp_point_mutation(tree: &ExprTree, n_vars: usize, rng: &mut RngStream) -> ExprTree {
    let mut out = tree.clone();
    let idx = rng.random_range(0..out.node_count());
    let node = out.subtree_mut(idx).expect("index within node count");
    match node {
        ExprTree::Var(_) | ExprTree::Const(_) => *node = random_terminal(n_vars, rng),
        ExprTree::Unary(op, _) => *op = UNARY[rng.random_range(0..UNARY.len())],
        ExprTree::Binary(op, _, _) => *op = BINARY[rng.random_range(0..BINARY.len())],
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub min_init_depth: usize,
    pub max_init_depth: usize,
    pub max_depth: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            population: 60,
            generations: 20,
            tournament: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            min_init_depth: 2,
            max_init_depth: 4,
            max_depth: 7,
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return usage("GP population must hold at least 2 trees");
        }
        if self.tournament == 0 {
            return usage("GP tournament size must be positive");
        }
        if self.min_init_depth > self.max_init_depth || self.max_init_depth > self.max_depth {
            return usage("GP depths must satisfy min_init <= max_init <= max_depth");
        }
        for p in [self.crossover_rate, self.mutation_rate] {
            if !(0.0..=1.0).contains(&p) {
                return usage(format!("GP rate {p} must be in [0, 1]"));
            }
        }
        Ok(())
    }
}

fn tree_column(tree: &ExprTree, ds: &Dataset) -> Vec<f64> {
    ds.features
        .iter()
        .map(|r| gp_eval(tree, r).unwrap_or(0.0))
        .collect()
}

fn score_tree(tree: &ExprTree, ds: &Dataset, labels: &[f64]) -> f64 {
    filter_score(&tree_column(tree, ds), labels).unwrap_or(0.0)
}

/// Evolves expression trees scored by filter score and appends the `count`
/// best as normalized columns `gp_0..`. Original columns are kept.
pub fn gp_generate_features(
    ds: &Dataset,
    count: usize,
    config: &GpConfig,
    rng: &mut RngStream,
) -> Result<Dataset> {
    config.validate()?;
    if count == 0 {
        return usage("feature count must be at least 1");
    }
    let n = ds.n_features();
    if n == 0 {
        return usage("GP needs at least one input feature");
    }
    if ds.missing_count() > 0 {
        return usage("GP needs complete data; impute missing values first");
    }
    let labels = ds.label_values();
    let mut pop = gp_ramped_half_and_half(
        config.population,
        n,
        config.min_init_depth,
        config.max_init_depth,
        rng,
    );
    let mut scores: Vec<f64> = pop.iter().map(|t| score_tree(t, ds, &labels)).collect();
    for _ in 0..config.generations {
        let mut next = vec![pop[argmax(scores.iter().copied()).expect("non-empty")].clone()];
        let pick = |rng: &mut RngStream, scores: &[f64]| {
            (0..config.tournament)
                .map(|_| rng.random_range(0..scores.len()))
                .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
                .expect("tournament is non-empty")
        };
        while next.len() < config.population {
            let a = &pop[pick(rng, &scores)];
            let b = &pop[pick(rng, &scores)];
            let (mut c1, mut c2) = if rng.random_bool(config.crossover_rate) {
                gp_subtree_crossover(a, b, config.max_depth, rng)
            } else {
                (a.clone(), b.clone())
            };
            if rng.random_bool(config.mutation_rate) {
                c1 = gp_point_mutation(&c1, n, rng);
            }
            if rng.random_bool(config.mutation_rate) {
                c2 = gp_point_mutation(&c2, n, rng);
            }
            next.push(c1);
            if next.len() < config.population {
                next.push(c2);
            }
        }
        pop = next;
        scores = pop.iter().map(|t| score_tree(t, ds, &labels)).collect();
    }

    // Best distinct expressions first; stable order keeps earlier trees on ties.
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut chosen: Vec<&ExprTree> = Vec::with_capacity(count);
    for &i in &order {
        if chosen.len() == count {
            break;
        }
        if !chosen.contains(&&pop[i]) {
            chosen.push(&pop[i]);
        }
    }
    for &i in &order {
        if chosen.len() == count {
            break;
        }
        chosen.push(&pop[i]);
    }

    let mut generated = Dataset::from_rows(
        ds.features
            .iter()
            .map(|r| {
                chosen
                    .iter()
                    .map(|t| gp_eval(t, r).unwrap_or(0.0))
                    .collect()
            })
            .collect(),
        ds.labels.clone(),
    )?;
    generated = normalize_minmax(&generated);
    let mut out = ds.clone();
    for (row, extra) in out.features.iter_mut().zip(generated.features) {
        row.extend(extra);
    }
    out.feature_names
        .extend((0..count).map(|k| format!("gp_{k}")));
    out.provenance.transforms.push(format!(
        "gp_generate_features({})",
        chosen
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ExprTree {
        // 4 * tan(x) + y^2
        ExprTree::binary(
            BinaryOp::Add,
            ExprTree::binary(
                BinaryOp::Mul,
                ExprTree::Const(4.0),
                ExprTree::unary(UnaryOp::Tan, ExprTree::Var(0)),
            ),
            ExprTree::unary(UnaryOp::Square, ExprTree::Var(1)),
        )
    }

    #[test]
    fn evaluation() {
        assert_eq!(gp_eval(&example(), &[0.0, 2.0]).unwrap(), 4.0);
        assert_eq!(gp_eval(&ExprTree::Var(0), &[-3.5]).unwrap(), -3.5);
        let div = ExprTree::binary(BinaryOp::Div, ExprTree::Var(0), ExprTree::Const(0.0));
        assert_eq!(gp_eval(&div, &[7.0]).unwrap(), 1.0);
        assert!(gp_eval(&ExprTree::Var(2), &[1.0]).is_err());
        let huge = ExprTree::unary(UnaryOp::Square, ExprTree::Const(1e200));
        assert_eq!(gp_eval(&huge, &[]).unwrap(), 0.0);
    }

    #[test]
    fn preorder_indexing() {
        let t = example();
        assert_eq!(t.node_count(), 7);
        assert_eq!(t.depth(), 3);
        assert_eq!(t.subtree(2), Some(&ExprTree::Const(4.0)));
        assert_eq!(t.subtree(4), Some(&ExprTree::Var(0)));
        assert_eq!(
            t.subtree(5),
            Some(&ExprTree::unary(UnaryOp::Square, ExprTree::Var(1)))
        );
        assert_eq!(t.subtree(7), None);
    }

    #[test]
    fn crossover_cases() {
        let a = example();
        let b = ExprTree::binary(BinaryOp::Sub, ExprTree::Var(2), ExprTree::Const(1.0));
        assert_eq!(
            swap_subtrees(&a, &a, 4, 4, 7).unwrap(),
            (a.clone(), a.clone())
        );
        assert_eq!(
            swap_subtrees(&a, &b, 0, 0, 7).unwrap(),
            (b.clone(), a.clone())
        );
        let (c1, c2) = swap_subtrees(&a, &b, 5, 1, 7).unwrap();
        assert_eq!(
            c1.node_count() + c2.node_count(),
            a.node_count() + b.node_count()
        );
        // Depth guard: the deep child falls back to its parent.
        let (c1, c2) = swap_subtrees(&b, &a, 1, 0, 3).unwrap();
        assert_eq!(c1, b);
        assert_eq!(c2.depth(), 0);
    }

    #[test]
    fn ramped_depths() {
        let mut rng = RngStream::new(0);
        let pop = gp_ramped_half_and_half(30, 3, 2, 4, &mut rng);
        assert!(pop
            .iter()
            .all(|t| t.depth() <= 4 && t.max_var().is_none_or(|v| v < 3)));
        assert!(pop.iter().step_by(2).all(|t| t.depth() >= 2));
    }

    #[test]
    fn zero_generations_appends_columns() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64 / 20.0, (i % 3) as f64])
            .collect();
        let labels = (0..20).map(|i| usize::from(i >= 10)).collect();
        let ds = Dataset::from_rows(rows, labels).unwrap();
        let config = GpConfig {
            generations: 0,
            ..Default::default()
        };
        let out = gp_generate_features(&ds, 2, &config, &mut RngStream::new(1)).unwrap();
        assert_eq!(out.n_features(), 4);
        assert_eq!(&out.feature_names[2..], ["gp_0", "gp_1"]);
        for (a, b) in out.features.iter().zip(&ds.features) {
            assert_eq!(&a[..2], &b[..]);
            assert!(a[2..].iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
