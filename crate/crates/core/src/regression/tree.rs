//! CART regression tree grown by greedy variance reduction.
//!
//! Samples are put in a canonical order before growing, and among equally
//! good splits the lowest feature index and then the smallest threshold win,
//! so the fitted tree does not depend on input order.

use std::cmp::Ordering;

use super::Sample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub min_leaf: usize,
    pub max_depth: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { min_leaf: 5, max_depth: 12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf { value: f64, n: usize },
    /// Samples with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl RegressionTree {
    pub fn fit(samples: &[Sample], params: &TreeParams) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("cannot grow a tree on zero samples".into()));
        }
        if params.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be >= 1".into()));
        }
        let mut canon: Vec<&Sample> = samples.iter().collect();
        canon.sort_by(|a, b| canonical_cmp(a, b));
        let data: Vec<Sample> = canon.into_iter().cloned().collect();
        let mut tree = RegressionTree { nodes: Vec::new() };
        let idx: Vec<usize> = (0..data.len()).collect();
        tree.grow(&data, idx, 0, params);
        Ok(tree)
    }

    fn grow(&mut self, data: &[Sample], idx: Vec<usize>, depth: usize, params: &TreeParams) -> usize {
        let id = self.nodes.len();
        let sum: f64 = idx.iter().map(|&i| data[i].target).sum();
        self.nodes.push(TreeNode::Leaf { value: sum / idx.len() as f64, n: idx.len() });
        if depth >= params.max_depth || idx.len() < 2 * params.min_leaf {
            return id;
        }
        let Some(best) = best_split(data, &idx, params.min_leaf) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| data[i].features[best.feature] <= best.threshold);
        let left = self.grow(data, l, depth + 1, params);
        let right = self.grow(data, r, depth + 1, params);
        self.nodes[id] = TreeNode::Split { feature: best.feature, threshold: best.threshold, left, right };
        id
    }

    pub fn predict_raw(&self, features: &[f64]) -> f64 {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if features[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn canonical_cmp(a: &Sample, b: &Sample) -> Ordering {
    a.features
        .iter()
        .zip(&b.features)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.target.total_cmp(&b.target))
}

/// Split maximizing the reduction of squared error, or `None` when no split
/// reduces it.
fn best_split(data: &[Sample], idx: &[usize], min_leaf: usize) -> Option<Best> {
    let n = idx.len();
    let total: f64 = idx.iter().map(|&i| data[i].target).sum();
    let parent = total * total / n as f64;
    let n_features = data[idx[0]].features.len();
    let mut best: Option<Best> = None;
    let mut order = idx.to_vec();
    for f in 0..n_features {
        // Stable sort keeps canonical order among equal values.
        order.sort_by(|&a, &b| data[a].features[f].total_cmp(&data[b].features[f]));
        let mut left_sum = 0.0;
        for k in 1..n {
            left_sum += data[order[k - 1]].target;
            if k < min_leaf || n - k < min_leaf {
                continue;
            }
            let (lo, hi) = (data[order[k - 1]].features[f], data[order[k]].features[f]);
            if lo >= hi {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / k as f64 + right_sum * right_sum / (n - k) as f64 - parent;
            let threshold = lo + (hi - lo) / 2.0;
            if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain + 1e-12) {
                best = Some(Best { gain, feature: f, threshold });
            }
        }
    }
    best
}
