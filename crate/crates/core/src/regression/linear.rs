use super::linalg::{gram, solve_spd};
use super::Sample;
use crate::Result;

/// Ordinary least squares with an intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    /// `[intercept, w_1, ..., w_p]`.
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn fit(samples: &[Sample]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.features.clone()).collect();
        let targets: Vec<f64> = samples.iter().map(|s| s.target).collect();
        let (xtx, xty) = gram(&rows, &targets);
        Ok(Self { coefficients: solve_spd(&xtx, &xty)? })
    }

    /// Unclamped model output.
    pub fn predict_raw(&self, features: &[f64]) -> f64 {
        self.coefficients[0] + self.coefficients[1..].iter().zip(features).map(|(w, x)| w * x).sum::<f64>()
    }
}
