//! One live teaching session and the store that owns them all.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use manner_core::agents::{AgentError, AgentState, BeliefSnapshot, IngestReport};
use manner_core::behaviour::{render_curve, Curve};
use manner_core::domain::{parse_utterance, render_utterance, GrammarError, Situation};
use manner_core::experiment::StepRecord;
use manner_core::world::{ConfigError, GroundTruth, WorldConfig};
use manner_core::{Action, BehaviourPoint, Strategy, StrategyRegistry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Simulated,
    Human,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("unknown session '{0}'")]
    UnknownSession(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("step {0} is still waiting for feedback")]
    AwaitingFeedback(usize),
    #[error("no step has been taken yet")]
    NoPendingStep,
    #[error("feedback for step {0} was already given")]
    FeedbackAlreadyGiven(usize),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("{path}: {source}")]
    Persist {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Corrupt {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl SessionError {
    /// Stable identifier sent to clients.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::UnknownSession(_) => "UnknownSession",
            SessionError::Config(ConfigError::UnknownPreset(_)) => "UnknownPreset",
            SessionError::Config(_) => "InvalidConfig",
            SessionError::Grammar(e) => e.code(),
            SessionError::AwaitingFeedback(_) => "AwaitingFeedback",
            SessionError::NoPendingStep => "NoPendingStep",
            SessionError::FeedbackAlreadyGiven(_) => "FeedbackAlreadyGiven",
            SessionError::Agent(AgentError::UnknownStrategy(_)) => "UnknownStrategy",
            SessionError::Agent(_) => "AgentError",
            SessionError::Persist { .. } | SessionError::Corrupt { .. } => "PersistError",
        }
    }
}

/// Enough to rebuild a generator at the exact same position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RngState {
    seed: [u8; 32],
    stream: u64,
    word_pos: u128,
}

impl From<&ChaCha8Rng> for RngState {
    fn from(rng: &ChaCha8Rng) -> Self {
        RngState {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }
}

impl From<&RngState> for ChaCha8Rng {
    fn from(s: &RngState) -> Self {
        let mut rng = ChaCha8Rng::from_seed(s.seed);
        rng.set_stream(s.stream);
        rng.set_word_pos(s.word_pos);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurrentStep {
    pub index: usize,
    pub situation: Situation,
    pub action: Action,
    pub curve: Curve,
    pub feedback: Option<String>,
}

/// Response to an advance request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepView {
    pub step: usize,
    pub situation: Situation,
    pub point: BehaviourPoint,
    pub curve: Curve,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub simulated_feedback: Option<String>,
}

/// What one piece of feedback changed in the learner.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvidenceSummary {
    pub applied: bool,
    pub assent: bool,
    pub grounding_exemplars: Vec<(String, f64)>,
    pub confirmed_rules: Vec<String>,
    pub rule_hypotheses: Vec<(String, f64)>,
    pub negative_adverb_exemplars: Vec<(String, f64)>,
    pub new_colours: Vec<String>,
    pub penalised_rules: Vec<(String, f64)>,
    pub positive_exemplars: Vec<(String, f64)>,
}

impl From<IngestReport> for EvidenceSummary {
    fn from(r: IngestReport) -> Self {
        let e = r.evidence;
        EvidenceSummary {
            applied: r.applied,
            assent: e.assent,
            grounding_exemplars: e.grounding_exemplars.into_iter().map(|(c, w, _)| (c, w)).collect(),
            confirmed_rules: e.confirmed_rules.iter().map(ToString::to_string).collect(),
            rule_hypotheses: e.rule_hypotheses.iter().map(|(r, w)| (r.to_string(), *w)).collect(),
            negative_adverb_exemplars: e.negative_adverb_exemplars,
            new_colours: r.new_colours,
            penalised_rules: r.penalised_rules.iter().map(|(r, w)| (r.to_string(), *w)).collect(),
            positive_exemplars: r.positive_exemplars,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeedbackResult {
    pub step: usize,
    pub evidence_applied: EvidenceSummary,
    pub cumulative_regret: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct History {
    pub steps: Vec<StepRecord>,
    pub cumulative_regret: u32,
}

/// On-disk form of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SessionFile {
    id: String,
    mode: Mode,
    seed: u64,
    config: WorldConfig,
    agent: AgentState,
    world_rng: RngState,
    agent_rng: RngState,
    current: Option<CurrentStep>,
    history: Vec<StepRecord>,
}

/// A learner facing either the simulated teacher or a human.
///
/// Situations always come from the config's world. In human mode the world's
/// rules are never consulted.
pub struct Session {
    id: String,
    mode: Mode,
    seed: u64,
    config: WorldConfig,
    world: GroundTruth,
    agent: Box<dyn Strategy>,
    world_rng: ChaCha8Rng,
    agent_rng: ChaCha8Rng,
    current: Option<CurrentStep>,
    history: Vec<StepRecord>,
}

impl Session {
    pub fn new(
        id: String,
        registry: &StrategyRegistry,
        strategy: &str,
        mode: Mode,
        config: WorldConfig,
        seed: u64,
    ) -> Result<Self, SessionError> {
        let world = config.ground_truth()?;
        let agent = registry.create(strategy, &config.agent_config())?;
        let mut agent_rng = ChaCha8Rng::seed_from_u64(seed);
        agent_rng.set_stream(1);
        Ok(Session {
            id,
            mode,
            seed,
            config,
            world,
            agent,
            world_rng: ChaCha8Rng::seed_from_u64(seed),
            agent_rng,
            current: None,
            history: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn strategy(&self) -> &str {
        self.agent.name()
    }

    pub fn current(&self) -> Option<&CurrentStep> {
        self.current.as_ref()
    }

    pub fn cumulative_regret(&self) -> u32 {
        self.history.last().map_or(0, |s| s.cumulative_regret)
    }

    /// Presents the next situation and the learner's action. In simulated
    /// mode the teacher's utterance is fed straight back through
    /// [`Session::feedback`].
    pub fn step(&mut self) -> Result<StepView, SessionError> {
        if let Some(c) = &self.current {
            if c.feedback.is_none() {
                return Err(SessionError::AwaitingFeedback(c.index));
            }
        }
        let index = self.history.len();
        let situation = self
            .world
            .generate_situation(self.config.constrained_fraction, &mut self.world_rng);
        let action = self.agent.act(&situation, &mut self.agent_rng)?;
        let curve = render_curve(&action.point);
        let view = StepView {
            step: index,
            situation: situation.clone(),
            point: action.point,
            curve: curve.clone(),
            simulated_feedback: None,
        };
        self.current = Some(CurrentStep {
            index,
            situation,
            action,
            curve,
            feedback: None,
        });
        match self.mode {
            Mode::Human => Ok(view),
            Mode::Simulated => {
                let c = self.current.as_ref().expect("just set");
                let text = render_utterance(&self.world.give_feedback(&c.situation, &c.action.point));
                self.feedback(&text)?;
                Ok(StepView {
                    simulated_feedback: Some(text),
                    ..view
                })
            }
        }
    }

    /// Parses `text` against the learner's vocabulary and lets it learn.
    pub fn feedback(&mut self, text: &str) -> Result<FeedbackResult, SessionError> {
        let current = self.current.as_ref().ok_or(SessionError::NoPendingStep)?;
        if current.feedback.is_some() {
            return Err(SessionError::FeedbackAlreadyGiven(current.index));
        }
        let parsed = parse_utterance(text, self.agent.lexicon())?;
        let report = self.agent.ingest(
            &current.situation,
            &current.action.point,
            &parsed.utterance,
            current.action.option.as_ref(),
        )?;
        let corrected = !parsed.utterance.is_assent();
        let regret = self.cumulative_regret() + u32::from(corrected);
        self.history.push(StepRecord {
            index: current.index,
            situation: current.situation.clone(),
            point: current.action.point,
            option: current.action.option.clone(),
            utterance: text.to_string(),
            kind: parsed.utterance.kind(),
            corrected,
            cumulative_regret: regret,
        });
        let index = current.index;
        if let Some(c) = self.current.as_mut() {
            c.feedback = Some(text.to_string());
        }
        Ok(FeedbackResult {
            step: index,
            evidence_applied: report.into(),
            cumulative_regret: regret,
        })
    }

    pub fn beliefs(&self) -> BeliefSnapshot {
        self.agent.snapshot()
    }

    pub fn history(&self) -> History {
        History {
            steps: self.history.clone(),
            cumulative_regret: self.cumulative_regret(),
        }
    }

    fn to_file(&self) -> SessionFile {
        SessionFile {
            id: self.id.clone(),
            mode: self.mode,
            seed: self.seed,
            config: self.config.clone(),
            agent: self.agent.export_state(),
            world_rng: (&self.world_rng).into(),
            agent_rng: (&self.agent_rng).into(),
            current: self.current.clone(),
            history: self.history.clone(),
        }
    }

    fn from_file(f: SessionFile) -> Result<Self, SessionError> {
        Ok(Session {
            world: f.config.ground_truth()?,
            id: f.id,
            mode: f.mode,
            seed: f.seed,
            config: f.config,
            agent: f.agent.into_strategy(),
            world_rng: (&f.world_rng).into(),
            agent_rng: (&f.agent_rng).into(),
            current: f.current,
            history: f.history,
        })
    }

    /// Writes `<dir>/<id>.json` via a temporary file and a rename.
    pub fn save(&self, dir: &Path) -> Result<(), SessionError> {
        let path = dir.join(format!("{}.json", self.id));
        let tmp = dir.join(format!(".{}.json.tmp", self.id));
        let text = serde_json::to_string(&self.to_file()).expect("session state serializes");
        let io = |source| SessionError::Persist {
            path: path.display().to_string(),
            source,
        };
        fs::write(&tmp, text).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, SessionError> {
        let text = fs::read_to_string(path).map_err(|source| SessionError::Persist {
            path: path.display().to_string(),
            source,
        })?;
        let file = serde_json::from_str(&text).map_err(|source| SessionError::Corrupt {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_file(file)
    }
}

pub type SessionHandle = Arc<Mutex<Session>>;

/// Every live session, plus the defaults new ones are created with.
pub struct SessionStore {
    sessions: Mutex<HashMap<String, SessionHandle>>,
    registry: StrategyRegistry,
    default_config: WorldConfig,
    default_mode: Mode,
    persist: Option<PathBuf>,
}

impl SessionStore {
    pub fn new(default_config: WorldConfig, default_mode: Mode) -> Self {
        SessionStore {
            sessions: Mutex::new(HashMap::new()),
            registry: StrategyRegistry::builtin(),
            default_config,
            default_mode,
            persist: None,
        }
    }

    /// Snapshots go to `dir`; sessions already there are loaded.
    pub fn with_persistence(mut self, dir: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let dir = dir.into();
        let io = |source| SessionError::Persist {
            path: dir.display().to_string(),
            source,
        };
        fs::create_dir_all(&dir).map_err(io)?;
        let mut loaded = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let s = Session::load(&path)?;
                loaded.insert(s.id.clone(), Arc::new(Mutex::new(s)));
            }
        }
        self.sessions = Mutex::new(loaded);
        self.persist = Some(dir);
        Ok(self)
    }

    pub fn default_mode(&self) -> Mode {
        self.default_mode
    }

    pub fn default_config(&self) -> &WorldConfig {
        &self.default_config
    }

    pub fn create(
        &self,
        strategy: &str,
        mode: Option<Mode>,
        config: Option<WorldConfig>,
        seed: Option<u64>,
    ) -> Result<SessionHandle, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::new(
            id.clone(),
            &self.registry,
            strategy,
            mode.unwrap_or(self.default_mode),
            config.unwrap_or_else(|| self.default_config.clone()),
            seed.unwrap_or_else(rand::random),
        )?;
        self.save(&session)?;
        let handle = Arc::new(Mutex::new(session));
        self.sessions.lock().expect("store lock").insert(id, handle.clone());
        Ok(handle)
    }

    pub fn get(&self, id: &str) -> Result<SessionHandle, SessionError> {
        self.sessions
            .lock()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.lock().expect("store lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn save(&self, session: &Session) -> Result<(), SessionError> {
        match &self.persist {
            Some(dir) => session.save(dir),
            None => Ok(()),
        }
    }
}
