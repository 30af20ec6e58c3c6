use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{uniform_point, Action, AgentConfig, AgentError, AgentState, BeliefSnapshot, IngestReport, Strategy};
use crate::domain::{BehaviourPoint, Lexicon, Situation, Utterance};
use crate::inference::MannerOption;

/// Uniform points, no learning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomAgent {
    lexicon: Lexicon,
}

impl RandomAgent {
    pub fn new(config: &AgentConfig) -> Self {
        RandomAgent {
            lexicon: config.lexicon.clone(),
        }
    }
}

impl Strategy for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&mut self, _situation: &Situation, rng: &mut dyn RngCore) -> Result<Action, AgentError> {
        Ok(Action {
            point: uniform_point(rng),
            option: None,
        })
    }

    fn ingest(
        &mut self,
        _situation: &Situation,
        _point: &BehaviourPoint,
        _utterance: &Utterance,
        _chosen: Option<&MannerOption>,
    ) -> Result<IngestReport, AgentError> {
        Ok(IngestReport::default())
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn snapshot(&self) -> BeliefSnapshot {
        BeliefSnapshot {
            strategy: self.name().to_string(),
            ..Default::default()
        }
    }

    fn export_state(&self) -> AgentState {
        AgentState::Random(self.clone())
    }
}
