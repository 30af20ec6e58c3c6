//! Beta-distributed beliefs over candidate rules.
//!
//! `alpha` accumulates (possibly fractional) evidence that a rule holds and
//! `beta` evidence that it does not; the belief is the Beta mean
//! `alpha / (alpha + beta)`. A rule stated outright by a full correction is
//! confirmed and keeps belief 1 regardless of later evidence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{Rgb, Rule, Situation};

pub const DEFAULT_ALPHA0: f64 = 1.0;
pub const DEFAULT_BETA0: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("evidence weight {0} must lie in (0, 1]")]
    InvalidWeight(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleBelief {
    pub rule: Rule,
    pub alpha: f64,
    pub beta: f64,
    pub confirmed: bool,
}

impl RuleBelief {
    pub fn belief(&self) -> f64 {
        if self.confirmed {
            1.0
        } else {
            self.alpha / (self.alpha + self.beta)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RuleStoreRepr", into = "RuleStoreRepr")]
pub struct RuleStore {
    beliefs: BTreeMap<Rule, RuleBelief>,
    alpha0: f64,
    beta0: f64,
    /// Bumped whenever a new rule appears, i.e. whenever the net structure
    /// derived from this store may change.
    revision: u64,
}

#[derive(Serialize, Deserialize)]
struct RuleStoreRepr {
    beliefs: Vec<RuleBelief>,
    alpha0: f64,
    beta0: f64,
    revision: u64,
}

impl From<RuleStoreRepr> for RuleStore {
    fn from(r: RuleStoreRepr) -> Self {
        RuleStore {
            beliefs: r.beliefs.into_iter().map(|b| (b.rule.clone(), b)).collect(),
            alpha0: r.alpha0,
            beta0: r.beta0,
            revision: r.revision,
        }
    }
}

impl From<RuleStore> for RuleStoreRepr {
    fn from(s: RuleStore) -> Self {
        RuleStoreRepr {
            beliefs: s.beliefs.into_values().collect(),
            alpha0: s.alpha0,
            beta0: s.beta0,
            revision: s.revision,
        }
    }
}

impl Default for RuleStore {
    fn default() -> Self {
        RuleStore::new(DEFAULT_ALPHA0, DEFAULT_BETA0)
    }
}

fn check_weight(weight: f64) -> Result<(), RuleError> {
    if weight > 0.0 && weight <= 1.0 {
        Ok(())
    } else {
        Err(RuleError::InvalidWeight(weight))
    }
}

impl RuleStore {
    pub fn new(alpha0: f64, beta0: f64) -> Self {
        assert!(alpha0 > 0.0 && beta0 > 0.0, "Beta pseudo-counts must be positive");
        RuleStore {
            beliefs: BTreeMap::new(),
            alpha0,
            beta0,
            revision: 0,
        }
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RuleBelief> {
        self.beliefs.values()
    }

    pub fn get(&self, rule: &Rule) -> Option<&RuleBelief> {
        self.beliefs.get(rule)
    }

    fn entry(&mut self, rule: &Rule) -> &mut RuleBelief {
        if !self.beliefs.contains_key(rule) {
            self.revision += 1;
        }
        let (alpha0, beta0) = (self.alpha0, self.beta0);
        self.beliefs.entry(rule.clone()).or_insert_with(|| RuleBelief {
            rule: rule.clone(),
            alpha: alpha0,
            beta: beta0,
            confirmed: false,
        })
    }

    pub fn confirm(&mut self, rule: &Rule) {
        self.entry(rule).confirmed = true;
    }

    pub fn add_positive(&mut self, rule: &Rule, weight: f64) -> Result<(), RuleError> {
        check_weight(weight)?;
        let b = self.entry(rule);
        if !b.confirmed {
            b.alpha += weight;
        }
        Ok(())
    }

    pub fn add_negative(&mut self, rule: &Rule, weight: f64) -> Result<(), RuleError> {
        check_weight(weight)?;
        let b = self.entry(rule);
        if !b.confirmed {
            b.beta += weight;
        }
        Ok(())
    }

    pub fn belief(&self, rule: &Rule) -> f64 {
        self.beliefs
            .get(rule)
            .map(RuleBelief::belief)
            .unwrap_or(self.alpha0 / (self.alpha0 + self.beta0))
    }

    /// Every stored rule with the probability that its body holds in
    /// `situation`.
    pub fn rules_matching(
        &self,
        situation: &Situation,
        colour_posterior: impl Fn(&str, &Rgb) -> f64,
    ) -> Vec<(Rule, f64)> {
        self.beliefs
            .keys()
            .map(|r| (r.clone(), r.body.match_probability(situation, &colour_posterior)))
            .collect()
    }
}
