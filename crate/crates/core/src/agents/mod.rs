//! The five strategies behind one interface, looked up by name.

mod just_no;
mod learner;
mod random;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::behaviour::{BehaviourError, ModelParams};
use crate::domain::{
    BehaviourPoint, Dimension, EvidenceBundle, InterpretError, Lexicon, Rule, Shape, Situation, Utterance,
};
use crate::grounding::{GroundingError, DEFAULT_BANDWIDTH, DEFAULT_PRIOR};
use crate::inference::{InferenceError, MannerOption, NetSnapshot, DEFAULT_LEAK};
use crate::rules::RuleError;

pub use just_no::{EpisodeRecord, JustNo, JustNoParams};
pub use learner::{Learner, LearnerKind};
pub use random::RandomAgent;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
    #[error(transparent)]
    Interpret(#[from] InterpretError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Behaviour(#[from] BehaviourError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// What an agent did: the point, and for the learner the manner option it
/// was realising.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub point: BehaviourPoint,
    pub option: Option<MannerOption>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LearnerParams {
    pub colour_prior: f64,
    pub colour_bandwidth: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub behaviour: ModelParams,
    pub leak: f64,
    pub positive_threshold: f64,
    /// Partial-correction hypotheses lighter than this are not instantiated.
    pub min_hypothesis_weight: f64,
    pub guard_positives: bool,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            colour_prior: DEFAULT_PRIOR,
            colour_bandwidth: DEFAULT_BANDWIDTH,
            alpha0: crate::rules::DEFAULT_ALPHA0,
            beta0: crate::rules::DEFAULT_BETA0,
            behaviour: ModelParams::default(),
            leak: DEFAULT_LEAK,
            positive_threshold: 0.7,
            min_hypothesis_weight: 0.01,
            guard_positives: true,
        }
    }
}

/// Everything a strategy is built from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub lexicon: Lexicon,
    pub learner: LearnerParams,
    pub just_no: JustNoParams,
}

impl AgentConfig {
    pub fn new(
        shapes: impl IntoIterator<Item = Shape>,
        adverbs: impl IntoIterator<Item = (String, Dimension)>,
    ) -> Self {
        AgentConfig {
            lexicon: Lexicon::new(shapes, adverbs),
            ..Default::default()
        }
    }
}

/// Outcome of one `ingest` call.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IngestReport {
    /// `false` when the strategy ignored the feedback's content.
    pub applied: bool,
    pub evidence: EvidenceBundle,
    pub new_colours: Vec<String>,
    pub penalised_rules: Vec<(Rule, f64)>,
    pub positive_exemplars: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleView {
    pub rule: String,
    pub alpha: f64,
    pub beta: f64,
    pub confirmed: bool,
    pub belief: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColourView {
    pub name: String,
    pub exemplar_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdverbView {
    pub name: String,
    pub dimension: Dimension,
    pub mu: f64,
    pub sigma: f64,
    pub pos_count: usize,
    pub neg_count: usize,
}

/// Read-only view of a strategy's learnt state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BeliefSnapshot {
    pub strategy: String,
    pub rules: Vec<RuleView>,
    pub colours: Vec<ColourView>,
    pub adverbs: Vec<AdverbView>,
    pub net: NetSnapshot,
    pub episodic_records: usize,
}

/// Serializable strategy state, used to persist and restore sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum AgentState {
    Learner(Box<Learner>),
    JustNo(JustNo),
    Random(RandomAgent),
}

pub trait Strategy: Send {
    fn name(&self) -> &str;

    fn act(&mut self, situation: &Situation, rng: &mut dyn RngCore) -> Result<Action, AgentError>;

    /// Learns from the teacher's response to `point` in `situation`.
    /// `chosen` is the option returned by the matching `act` call.
    fn ingest(
        &mut self,
        situation: &Situation,
        point: &BehaviourPoint,
        utterance: &Utterance,
        chosen: Option<&MannerOption>,
    ) -> Result<IngestReport, AgentError>;

    /// The vocabulary teacher utterances are parsed against.
    fn lexicon(&self) -> &Lexicon;

    fn snapshot(&self) -> BeliefSnapshot;

    fn export_state(&self) -> AgentState;
}

impl fmt::Debug for dyn Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Strategy({})", self.name())
    }
}

impl AgentState {
    pub fn into_strategy(self) -> Box<dyn Strategy> {
        match self {
            AgentState::Learner(l) => l,
            AgentState::JustNo(j) => Box::new(j),
            AgentState::Random(r) => Box::new(r),
        }
    }
}

pub type Factory = fn(&AgentConfig) -> Box<dyn Strategy>;

/// Name to constructor table.
#[derive(Clone)]
pub struct StrategyRegistry {
    factories: BTreeMap<String, Factory>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry {
            factories: BTreeMap::new(),
        }
    }

    /// `full`, `no-assent`, `no-negative`, `just-no` and `random`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("full", |c| Box::new(Learner::new(LearnerKind::Full, c)));
        r.register("no-assent", |c| Box::new(Learner::new(LearnerKind::NoAssent, c)));
        r.register("no-negative", |c| Box::new(Learner::new(LearnerKind::NoNegative, c)));
        r.register("just-no", |c| Box::new(JustNo::new(c)));
        r.register("random", |c| Box::new(RandomAgent::new(c)));
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn create(&self, name: &str, config: &AgentConfig) -> Result<Box<dyn Strategy>, AgentError> {
        self.factories
            .get(name)
            .map(|f| f(config))
            .ok_or_else(|| AgentError::UnknownStrategy(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }
}

fn uniform_point(rng: &mut dyn RngCore) -> BehaviourPoint {
    BehaviourPoint::new(rng.random(), rng.random(), rng.random()).expect("unit interval draws")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        let r = StrategyRegistry::builtin();
        assert_eq!(
            r.names().collect::<Vec<_>>(),
            vec!["full", "just-no", "no-assent", "no-negative", "random"]
        );
    }

    #[test]
    fn unknown_name_is_an_error() {
        let r = StrategyRegistry::builtin();
        let err = r.create("greedy", &AgentConfig::default()).unwrap_err();
        assert!(matches!(err, AgentError::UnknownStrategy(n) if n == "greedy"));
    }

    #[test]
    fn created_strategies_report_their_name() {
        let r = StrategyRegistry::builtin();
        for name in r.names() {
            let s = r.create(name, &AgentConfig::default()).unwrap();
            assert_eq!(s.name(), name);
            assert_eq!(s.export_state().into_strategy().name(), name);
        }
    }

    #[test]
    fn custom_registration() {
        let mut r = StrategyRegistry::empty();
        r.register("coin", |c| Box::new(RandomAgent::new(c)));
        assert!(r.contains("coin"));
        assert!(!r.contains("full"));
    }
}
