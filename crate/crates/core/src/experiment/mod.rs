//! Trials, regret and strategy comparisons.

mod export;
mod stats;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{AgentError, StrategyRegistry};
use crate::domain::{parse_utterance, render_utterance, BehaviourPoint, GrammarError, Situation, UtteranceKind};
use crate::inference::MannerOption;
use crate::world::{ConfigError, WorldConfig};

pub use export::{export_csv, export_curves, read_csv, terminal_regrets_from_rows, CsvRow, ExportError};
pub use stats::{mean, std_dev, variance, welch_t, StatsError, WelchResult};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("teacher utterance '{text}' did not parse: {source}")]
    Grammar {
        text: String,
        #[source]
        source: GrammarError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub index: usize,
    pub situation: Situation,
    pub point: BehaviourPoint,
    pub option: Option<MannerOption>,
    pub utterance: String,
    pub kind: UtteranceKind,
    pub corrected: bool,
    pub cumulative_regret: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub strategy: String,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
}

impl TrialRecord {
    pub fn terminal_regret(&self) -> u32 {
        self.steps.last().map_or(0, |s| s.cumulative_regret)
    }

    pub fn cumulative_regret(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.cumulative_regret).collect()
    }

    /// Fraction of corrected steps among the last `n`.
    pub fn tail_correction_rate(&self, n: usize) -> f64 {
        let tail = &self.steps[self.steps.len().saturating_sub(n)..];
        tail.iter().filter(|s| s.corrected).count() as f64 / tail.len().max(1) as f64
    }
}

/// The world and the agent draw from separate streams of the same seed, so
/// every strategy faces the same situations for a given seed until their
/// actions diverge.
fn rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let world = ChaCha8Rng::seed_from_u64(seed);
    let mut agent = ChaCha8Rng::seed_from_u64(seed);
    agent.set_stream(1);
    (world, agent)
}

pub fn run_trial(
    registry: &StrategyRegistry,
    strategy: &str,
    config: &WorldConfig,
    seed: u64,
) -> Result<TrialRecord, ExperimentError> {
    let gt = config.ground_truth()?;
    let mut agent = registry.create(strategy, &config.agent_config())?;
    let (mut world_rng, mut agent_rng) = rngs(seed);
    let mut steps = Vec::with_capacity(config.situations_per_trial);
    let mut regret = 0;
    for index in 0..config.situations_per_trial {
        let situation = gt.generate_situation(config.constrained_fraction, &mut world_rng);
        let action = agent.act(&situation, &mut agent_rng)?;
        let text = render_utterance(&gt.give_feedback(&situation, &action.point));
        let parsed = parse_utterance(&text, agent.lexicon()).map_err(|source| ExperimentError::Grammar {
            text: text.clone(),
            source,
        })?;
        agent.ingest(&situation, &action.point, &parsed.utterance, action.option.as_ref())?;
        let corrected = !parsed.utterance.is_assent();
        regret += u32::from(corrected);
        steps.push(StepRecord {
            index,
            situation,
            point: action.point,
            option: action.option,
            utterance: text,
            kind: parsed.utterance.kind(),
            corrected,
            cumulative_regret: regret,
        });
    }
    Ok(TrialRecord {
        strategy: strategy.to_string(),
        seed,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub mean: f64,
    pub std_dev: f64,
    pub terminal_regrets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub trials: BTreeMap<String, Vec<TrialRecord>>,
}

impl ExperimentResult {
    pub fn terminal_regrets(&self, strategy: &str) -> Vec<f64> {
        self.trials
            .get(strategy)
            .map(|ts| ts.iter().map(|t| f64::from(t.terminal_regret())).collect())
            .unwrap_or_default()
    }

    pub fn summary(&self) -> Vec<StrategySummary> {
        self.trials
            .keys()
            .map(|s| {
                let xs = self.terminal_regrets(s);
                StrategySummary {
                    strategy: s.clone(),
                    mean: mean(&xs),
                    std_dev: if xs.len() > 1 { std_dev(&xs) } else { 0.0 },
                    terminal_regrets: xs,
                }
            })
            .collect()
    }

    pub fn compare(&self, a: &str, b: &str) -> Result<WelchResult, StatsError> {
        welch_t(&self.terminal_regrets(a), &self.terminal_regrets(b))
    }

    /// Welch tests for every ordered pair of distinct strategies.
    pub fn pairwise(&self) -> Vec<(String, String, Result<WelchResult, StatsError>)> {
        let names: Vec<&String> = self.trials.keys().collect();
        let mut out = Vec::new();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                out.push(((*a).clone(), (*b).clone(), self.compare(a, b)));
            }
        }
        out
    }

    /// Mean cumulative regret at each step, per strategy.
    pub fn curves(&self) -> BTreeMap<String, Vec<f64>> {
        self.trials
            .iter()
            .map(|(s, ts)| {
                let len = ts.iter().map(|t| t.steps.len()).max().unwrap_or(0);
                let curve = (0..len)
                    .map(|i| {
                        let total: u32 = ts
                            .iter()
                            .filter_map(|t| t.steps.get(i))
                            .map(|st| st.cumulative_regret)
                            .sum();
                        f64::from(total) / ts.len() as f64
                    })
                    .collect();
                (s.clone(), curve)
            })
            .collect()
    }
}

/// Runs every strategy on every seed, trials in parallel.
pub fn run_experiment(
    registry: &StrategyRegistry,
    config: &WorldConfig,
    strategies: &[&str],
    seeds: &[u64],
) -> Result<ExperimentResult, ExperimentError> {
    config.ground_truth()?;
    for s in strategies {
        if !registry.contains(s) {
            return Err(AgentError::UnknownStrategy(s.to_string()).into());
        }
    }
    let jobs: Vec<(&str, u64)> = strategies
        .iter()
        .flat_map(|s| seeds.iter().map(move |&seed| (*s, seed)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(s, seed)| run_trial(registry, s, config, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let mut trials: BTreeMap<String, Vec<TrialRecord>> = BTreeMap::new();
    for r in records {
        trials.entry(r.strategy.clone()).or_default().push(r);
    }
    Ok(ExperimentResult { trials })
}
