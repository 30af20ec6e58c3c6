//! Colour grounding: one binary classifier `P(colour | rgb)` per colour word.
//!
//! The likelihood of an RGB value under a colour is a weighted Gaussian KDE
//! over the exemplars gathered for that colour. The evidence term contrasts it
//! with a uniform background density over the RGB cube, so a colour with no
//! data sits at its prior.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::Rgb;

pub const DEFAULT_PRIOR: f64 = 0.2;
pub const DEFAULT_BANDWIDTH: f64 = 25.0;
/// Uniform density over the 256^3 RGB cube.
pub const BACKGROUND_DENSITY: f64 = 1.0 / (256.0 * 256.0 * 256.0);

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GroundingError {
    #[error("exemplar weight {0} must lie in (0, 1]")]
    InvalidWeight(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedRgb {
    pub weight: f64,
    pub rgb: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingModel {
    datasets: BTreeMap<String, Vec<WeightedRgb>>,
    prior: f64,
    bandwidth: f64,
}

impl Default for GroundingModel {
    fn default() -> Self {
        GroundingModel::new(DEFAULT_PRIOR, DEFAULT_BANDWIDTH)
    }
}

/// Isotropic 3-D Gaussian kernel evaluated at squared distance `d2`.
pub fn gaussian_kernel_3d(d2: f64, bandwidth: f64) -> f64 {
    let h2 = bandwidth * bandwidth;
    (2.0 * PI * h2).powf(-1.5) * (-0.5 * d2 / h2).exp()
}

impl GroundingModel {
    pub fn new(prior: f64, bandwidth: f64) -> Self {
        assert!(prior > 0.0 && prior < 1.0, "prior must lie in (0, 1)");
        assert!(bandwidth > 0.0, "bandwidth must be positive");
        GroundingModel {
            datasets: BTreeMap::new(),
            prior,
            bandwidth,
        }
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Idempotent.
    pub fn ensure_colour(&mut self, name: &str) {
        self.datasets.entry(name.to_string()).or_default();
    }

    pub fn known_colours(&self) -> Vec<String> {
        self.datasets.keys().cloned().collect()
    }

    pub fn exemplars(&self, colour: &str) -> &[WeightedRgb] {
        self.datasets.get(colour).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Creates the colour if needed.
    pub fn add_exemplar(&mut self, colour: &str, weight: f64, rgb: Rgb) -> Result<(), GroundingError> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(GroundingError::InvalidWeight(weight));
        }
        self.datasets
            .entry(colour.to_string())
            .or_default()
            .push(WeightedRgb { weight, rgb });
        Ok(())
    }

    /// Weighted KDE density `sum(w_i * k(x - x_i)) / sum(w_i)`; `None` when
    /// the colour has no exemplars.
    pub fn likelihood(&self, colour: &str, rgb: &Rgb) -> Option<f64> {
        let data = self.datasets.get(colour).filter(|d| !d.is_empty())?;
        let total: f64 = data.iter().map(|e| e.weight).sum();
        let acc: f64 = data
            .iter()
            .map(|e| e.weight * gaussian_kernel_3d(rgb.squared_distance(&e.rgb), self.bandwidth))
            .sum();
        Some(acc / total)
    }

    pub fn posterior(&self, colour: &str, rgb: &Rgb) -> f64 {
        match self.likelihood(colour, rgb) {
            None => self.prior,
            Some(l) => {
                let num = l * self.prior;
                num / (num + BACKGROUND_DENSITY * (1.0 - self.prior))
            }
        }
    }
}
