//! Per-adverb generators on one behaviour dimension.
//!
//! Each adverb keeps positive (`X+`) and negative (`X-`) exemplars. A refit
//! classifies a regular grid on `[0, 1]` with the two kernel density
//! estimates and fits a Gaussian to the grid points judged more likely good
//! than bad. Negative data alone can therefore carve regions out of the
//! dimension before any positive example is seen.

mod curve;

pub use curve::{render_curve, Curve};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::{AdverbConcept, Dimension};

pub const DEFAULT_GRID_SIZE: usize = 101;
pub const DEFAULT_BANDWIDTH: f64 = 0.1;
pub const FALLBACK_MU: f64 = 0.5;
/// Standard deviation of the uniform distribution on `[0, 1]`.
pub const FALLBACK_SIGMA: f64 = 0.288_675_134_594_812_9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BehaviourError {
    #[error("behaviour value {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("no behaviour model for adverb '{0}'")]
    UnknownAdverb(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub grid_size: usize,
    pub bandwidth: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            grid_size: DEFAULT_GRID_SIZE,
            bandwidth: DEFAULT_BANDWIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdverbModel {
    adverb: AdverbConcept,
    positives: Vec<f64>,
    negatives: Vec<f64>,
    mu: f64,
    sigma: f64,
    params: ModelParams,
}

fn kde(data: &[f64], x: f64, bandwidth: f64) -> f64 {
    // An empty set carries no information: uniform density on [0, 1].
    if data.is_empty() {
        return 1.0;
    }
    let norm = 1.0 / (bandwidth * (2.0 * PI).sqrt());
    data.iter()
        .map(|&d| {
            let z = (x - d) / bandwidth;
            norm * (-0.5 * z * z).exp()
        })
        .sum::<f64>()
        / data.len() as f64
}

fn check_range(value: f64) -> Result<(), BehaviourError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(BehaviourError::OutOfRange(value))
    }
}

/// Draw from `N(mu, sigma^2)` clipped to `[0, 1]`; `sigma == 0` yields `mu`.
pub fn sample_clipped<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> f64 {
    if sigma <= 0.0 {
        return mu.clamp(0.0, 1.0);
    }
    let normal = Normal::new(mu, sigma).expect("finite positive sigma");
    normal.sample(rng).clamp(0.0, 1.0)
}

impl AdverbModel {
    pub fn new(adverb: AdverbConcept, params: ModelParams) -> Self {
        let mut m = AdverbModel {
            adverb,
            positives: Vec::new(),
            negatives: Vec::new(),
            mu: FALLBACK_MU,
            sigma: FALLBACK_SIGMA,
            params,
        };
        m.refit();
        m
    }

    pub fn adverb(&self) -> &AdverbConcept {
        &self.adverb
    }

    pub fn dimension(&self) -> Dimension {
        self.adverb.dimension
    }

    pub fn positives(&self) -> &[f64] {
        &self.positives
    }

    pub fn negatives(&self) -> &[f64] {
        &self.negatives
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn add_positive(&mut self, value: f64) -> Result<(), BehaviourError> {
        check_range(value)?;
        self.positives.push(value);
        self.refit();
        Ok(())
    }

    pub fn add_negative(&mut self, value: f64) -> Result<(), BehaviourError> {
        check_range(value)?;
        self.negatives.push(value);
        self.refit();
        Ok(())
    }

    /// `f+(x) / (f+(x) + f-(x))`.
    pub fn goodness(&self, x: f64) -> f64 {
        let pos = kde(&self.positives, x, self.params.bandwidth);
        let neg = kde(&self.negatives, x, self.params.bandwidth);
        if pos + neg <= 0.0 {
            0.5
        } else {
            pos / (pos + neg)
        }
    }

    pub fn refit(&mut self) -> (f64, f64) {
        let n = self.params.grid_size.max(2);
        let good: Vec<f64> = (0..n)
            .map(|i| i as f64 / (n - 1) as f64)
            .filter(|&x| self.goodness(x) > 0.5)
            .collect();
        if good.len() < 2 {
            self.mu = FALLBACK_MU;
            self.sigma = FALLBACK_SIGMA;
        } else {
            let count = good.len() as f64;
            let mean = good.iter().sum::<f64>() / count;
            let var = good.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count;
            self.mu = mean;
            self.sigma = var.sqrt();
        }
        (self.mu, self.sigma)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_clipped(self.mu, self.sigma, rng)
    }

    #[cfg(test)]
    pub(crate) fn force_fit(&mut self, mu: f64, sigma: f64) {
        self.mu = mu;
        self.sigma = sigma;
    }
}

/// All adverb generators a learner has created so far.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BehaviourModels {
    models: BTreeMap<String, AdverbModel>,
    params: ModelParams,
}

impl BehaviourModels {
    pub fn new(params: ModelParams) -> Self {
        BehaviourModels {
            models: BTreeMap::new(),
            params,
        }
    }

    pub fn ensure(&mut self, adverb: AdverbConcept) -> &mut AdverbModel {
        let params = self.params;
        self.models
            .entry(adverb.name.clone())
            .or_insert_with(|| AdverbModel::new(adverb, params))
    }

    pub fn get(&self, adverb: &str) -> Option<&AdverbModel> {
        self.models.get(adverb)
    }

    pub fn get_mut(&mut self, adverb: &str) -> Option<&mut AdverbModel> {
        self.models.get_mut(adverb)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AdverbModel> {
        self.models.values()
    }

    pub fn add_positive(&mut self, adverb: &str, value: f64) -> Result<(), BehaviourError> {
        self.models
            .get_mut(adverb)
            .ok_or_else(|| BehaviourError::UnknownAdverb(adverb.to_string()))?
            .add_positive(value)
    }

    pub fn add_negative(&mut self, adverb: &str, value: f64) -> Result<(), BehaviourError> {
        self.models
            .get_mut(adverb)
            .ok_or_else(|| BehaviourError::UnknownAdverb(adverb.to_string()))?
            .add_negative(value)
    }

    pub fn sample<R: Rng + ?Sized>(&self, adverb: &str, rng: &mut R) -> Result<f64, BehaviourError> {
        self.models
            .get(adverb)
            .map(|m| m.sample(rng))
            .ok_or_else(|| BehaviourError::UnknownAdverb(adverb.to_string()))
    }

    /// Total `(|X+|, |X-|)` over every adverb.
    pub fn exemplar_counts(&self) -> (usize, usize) {
        self.models
            .values()
            .fold((0, 0), |(p, n), m| (p + m.positives.len(), n + m.negatives.len()))
    }
}
