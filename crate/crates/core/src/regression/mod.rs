//! Probability estimators fitted on experience.
//!
//! Detection outcomes are regressed (not classified) on a small feature
//! vector built from the waypoint and the hour of day. Predictions are
//! clamped to `[0, 1]`. With no experience at all the estimator is
//! [`ProbEstimator::NoKnowledge`] and callers fall back to waiting.

mod bayes;
pub mod linalg;
mod linear;
mod tree;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bayes::{BayesPrior, BayesianLinear};
pub use linear::LinearModel;
pub use tree::{RegressionTree, TreeNode, TreeParams};

use crate::world::{MissionPlan, Waypoint};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Linear,
    Tree,
    Bayesian,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Linear, EstimatorKind::Tree, EstimatorKind::Bayesian];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Linear => "linear",
            EstimatorKind::Tree => "tree",
            EstimatorKind::Bayesian => "bayesian",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(EstimatorKind::Linear),
            "tree" => Ok(EstimatorKind::Tree),
            "bayesian" | "bayes" => Ok(EstimatorKind::Bayesian),
            other => Err(Error::Config(format!("unknown estimator '{other}' (expected linear, tree, bayesian)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// Normalized coordinates plus hour encodings.
    Coords,
    /// Normalized waypoint index plus hour encodings.
    Id,
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coords" => Ok(FeatureMode::Coords),
            "id" => Ok(FeatureMode::Id),
            other => Err(Error::Config(format!("unknown feature mode '{other}' (expected coords, id)"))),
        }
    }
}

/// Builds feature vectors `(x_norm, y_norm, sin h, cos h, h/24)`, or
/// `(id_norm, sin h, cos h, h/24)` in [`FeatureMode::Id`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureEncoder {
    mode: FeatureMode,
    min: (f64, f64),
    span: (f64, f64),
    max_id: f64,
}

impl FeatureEncoder {
    pub fn for_plan(plan: &MissionPlan, mode: FeatureMode) -> Self {
        let (x0, y0, x1, y1) = plan.bounding_box();
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let max_id = plan.waypoints.iter().map(|w| w.id).max().unwrap_or(1).max(1) as f64;
        Self { mode, min: (x0, y0), span: (span(x0, x1), span(y0, y1)), max_id }
    }

    pub fn encode(&self, wp: &Waypoint, hour: u32) -> Vec<f64> {
        let angle = TAU * hour as f64 / 24.0;
        let mut v = match self.mode {
            FeatureMode::Coords => vec![(wp.x - self.min.0) / self.span.0, (wp.y - self.min.1) / self.span.1],
            FeatureMode::Id => vec![wp.id as f64 / self.max_id],
        };
        v.extend([angle.sin(), angle.cos(), hour as f64 / 24.0]);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub tree: TreeParams,
    pub prior: BayesPrior,
}

impl EstimatorConfig {
    pub fn new(kind: EstimatorKind) -> Self {
        Self { kind, tree: TreeParams::default(), prior: BayesPrior::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbEstimator {
    /// No experience to learn from.
    NoKnowledge,
    Linear(LinearModel),
    Tree(RegressionTree),
    Bayesian(BayesianLinear),
}

impl ProbEstimator {
    /// Fits the configured model; an empty sample set yields [`ProbEstimator::NoKnowledge`].
    pub fn fit(config: &EstimatorConfig, samples: &[Sample]) -> Result<Self> {
        if samples.is_empty() {
            return Ok(ProbEstimator::NoKnowledge);
        }
        let width = samples[0].features.len();
        if samples.iter().any(|s| s.features.len() != width || s.features.iter().any(|x| !x.is_finite())) {
            return Err(Error::Domain("samples must share one width and be finite".into()));
        }
        Ok(match config.kind {
            EstimatorKind::Linear => ProbEstimator::Linear(LinearModel::fit(samples)?),
            EstimatorKind::Tree => ProbEstimator::Tree(RegressionTree::fit(samples, &config.tree)?),
            EstimatorKind::Bayesian => ProbEstimator::Bayesian(BayesianLinear::fit(samples, &config.prior)?),
        })
    }

    pub fn predict_raw(&self, features: &[f64]) -> Option<f64> {
        match self {
            ProbEstimator::NoKnowledge => None,
            ProbEstimator::Linear(m) => Some(m.predict_raw(features)),
            ProbEstimator::Tree(t) => Some(t.predict_raw(features)),
            ProbEstimator::Bayesian(b) => Some(b.predict_raw(features)),
        }
    }

    /// Probability estimate clamped to `[0, 1]`; `None` means "unknown".
    pub fn predict(&self, features: &[f64]) -> Option<f64> {
        self.predict_raw(features).map(|p| if p.is_nan() { 0.5 } else { p.clamp(0.0, 1.0) })
    }
}
