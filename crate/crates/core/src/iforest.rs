//! One-dimensional isolation forest.
//!
//! Each tree isolates points by recursive uniform random cuts between the
//! current minimum and maximum. Points that get isolated after few cuts are
//! anomalous. Scores follow the usual `2^(-E[h(x)] / c(psi))` normalization,
//! with `c` computed from exact harmonic numbers.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolationForestParams {
    pub n_trees: usize,
    pub max_samples: usize,
    /// Expected outlier fraction; sets the decision threshold.
    pub contamination: f64,
}

impl Default for IsolationForestParams {
    fn default() -> Self {
        Self { n_trees: 100, max_samples: 256, contamination: 0.01 }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { size: usize },
    Split { cut: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct IsolationTree {
    nodes: Vec<Node>,
}

/// A leaf of one tree seen as the interval of values routed to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafCell {
    /// Values `x` with `lo <= x < hi` reach this leaf.
    pub lo: f64,
    pub hi: f64,
    pub depth: usize,
    pub size: usize,
}

impl IsolationTree {
    fn build(sample: &mut [f64], height_limit: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut tree = IsolationTree { nodes: Vec::new() };
        tree.grow(sample, 0, height_limit, rng);
        tree
    }

    fn grow(&mut self, points: &mut [f64], depth: usize, limit: usize, rng: &mut ChaCha8Rng) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: points.len() });
        if depth >= limit || points.len() <= 1 {
            return id;
        }
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if lo == hi {
            return id;
        }
        let mut cut = rng.random_range(lo..hi);
        while cut <= lo {
            cut = rng.random_range(lo..hi);
        }
        points.sort_by(f64::total_cmp);
        let split_at = points.partition_point(|&x| x < cut);
        let (l, r) = points.split_at_mut(split_at);
        let left = self.grow(l, depth + 1, limit, rng);
        let right = self.grow(r, depth + 1, limit, rng);
        self.nodes[id] = Node::Split { cut, left, right };
        id
    }

    fn path_length(&self, x: f64) -> f64 {
        let mut node = 0;
        let mut depth = 0usize;
        loop {
            match self.nodes[node] {
                Node::Leaf { size } => return depth as f64 + average_path_length(size),
                Node::Split { cut, left, right } => {
                    node = if x < cut { left } else { right };
                    depth += 1;
                }
            }
        }
    }

    fn collect_leaves(&self, node: usize, lo: f64, hi: f64, depth: usize, out: &mut Vec<LeafCell>) {
        match self.nodes[node] {
            Node::Leaf { size } => out.push(LeafCell { lo, hi, depth, size }),
            Node::Split { cut, left, right } => {
                self.collect_leaves(left, lo, cut, depth + 1, out);
                self.collect_leaves(right, cut, hi, depth + 1, out);
            }
        }
    }
}

/// Average path length of an unsuccessful binary-search-tree lookup among
/// `n` points: `2 H(n-1) - 2 (n-1) / n`.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let harmonic: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
            2.0 * harmonic - 2.0 * (n - 1) as f64 / n as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsolationForest {
    trees: Vec<IsolationTree>,
    sample_size: usize,
    threshold: f64,
}

impl IsolationForest {
    pub fn fit(points: &[f64], params: &IsolationForestParams, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("isolation forest needs at least one point".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("isolation forest points must be finite".into()));
        }
        if params.n_trees == 0 || params.max_samples == 0 || !(0.0..=0.5).contains(&params.contamination) {
            return Err(Error::Config(format!("invalid isolation forest parameters {params:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample_size = params.max_samples.min(points.len());
        let height_limit = (sample_size as f64).log2().ceil() as usize;
        let trees = (0..params.n_trees)
            .map(|_| {
                let mut sample: Vec<f64> =
                    index::sample(&mut rng, points.len(), sample_size).into_iter().map(|i| points[i]).collect();
                IsolationTree::build(&mut sample, height_limit, &mut rng)
            })
            .collect();
        let mut forest = IsolationForest { trees, sample_size, threshold: f64::INFINITY };
        let scores: Vec<f64> = points.iter().map(|&x| forest.score(x)).collect();
        forest.threshold = quantile(&scores, 1.0 - params.contamination);
        Ok(forest)
    }

    /// Mean path length of `x` over all trees.
    pub fn mean_path_length(&self, x: f64) -> f64 {
        self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64
    }

    /// Anomaly score in `(0, 1]`; higher is more anomalous.
    pub fn score(&self, x: f64) -> f64 {
        let c = average_path_length(self.sample_size);
        if c == 0.0 {
            return 0.5;
        }
        2f64.powf(-self.mean_path_length(x) / c)
    }

    /// Score above which a point is an outlier: the `1 - contamination`
    /// quantile of the training scores.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_outlier(&self, x: f64) -> bool {
        self.score(x) > self.threshold
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    /// Leaves of every tree as value intervals, for inspection.
    pub fn leaf_cells(&self) -> Vec<Vec<LeafCell>> {
        self.trees
            .iter()
            .map(|t| {
                let mut out = Vec::new();
                t.collect_leaves(0, f64::NEG_INFINITY, f64::INFINITY, 0, &mut out);
                out
            })
            .collect()
    }
}

/// Linearly interpolated quantile, `q` in `[0, 1]`.
fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}
