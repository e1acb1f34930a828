//! Bayesian linear regression with a conjugate normal-inverse-gamma prior.
//!
//! Prior: `w | s2 ~ N(0, s2 / strength * I)`, `s2 ~ IG(a0, b0)`. The
//! posterior predictive is a Student-t whose mean is `x' m_n` with
//! `m_n = (X'X + strength I)^-1 X'y`.

use super::linalg::{gram, solve_spd};
use super::Sample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesPrior {
    /// Precision multiplier of the zero-mean coefficient prior.
    pub strength: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl Default for BayesPrior {
    fn default() -> Self {
        Self { strength: 1.0, alpha0: 1.0, beta0: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesianLinear {
    /// Posterior mean `[intercept, w_1, ..., w_p]`.
    pub mean: Vec<f64>,
    /// Posterior precision `X'X + strength I`, row-major.
    precision: Vec<f64>,
    pub alpha_n: f64,
    pub beta_n: f64,
}

impl BayesianLinear {
    pub fn fit(samples: &[Sample], prior: &BayesPrior) -> Result<Self> {
        if !(prior.strength >= 0.0) || !(prior.alpha0 > 0.0) || !(prior.beta0 > 0.0) {
            return Err(Error::Config(format!("invalid Bayesian prior {prior:?}")));
        }
        let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.features.clone()).collect();
        let targets: Vec<f64> = samples.iter().map(|s| s.target).collect();
        let (mut precision, xty) = gram(&rows, &targets);
        let p = xty.len();
        for i in 0..p {
            precision[i * p + i] += prior.strength;
        }
        let mean = solve_spd(&precision, &xty)?;
        let yty: f64 = targets.iter().map(|y| y * y).sum();
        let quad: f64 = (0..p).map(|i| mean[i] * (0..p).map(|j| precision[i * p + j] * mean[j]).sum::<f64>()).sum();
        Ok(Self {
            mean,
            precision,
            alpha_n: prior.alpha0 + samples.len() as f64 / 2.0,
            beta_n: prior.beta0 + 0.5 * (yty - quad).max(0.0),
        })
    }

    /// Posterior predictive mean, unclamped.
    pub fn predict_raw(&self, features: &[f64]) -> f64 {
        self.mean[0] + self.mean[1..].iter().zip(features).map(|(w, x)| w * x).sum::<f64>()
    }

    /// Variance of the Student-t posterior predictive (requires `alpha_n > 1`).
    pub fn predictive_variance(&self, features: &[f64]) -> Result<f64> {
        let mut z = vec![1.0];
        z.extend_from_slice(features);
        let v = solve_spd(&self.precision, &z)?;
        let scale = self.beta_n / self.alpha_n * (1.0 + z.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>());
        let dof = 2.0 * self.alpha_n;
        if dof <= 2.0 {
            return Err(Error::Domain("predictive variance undefined for <= 2 degrees of freedom".into()));
        }
        Ok(scale * dof / (dof - 2.0))
    }
}
