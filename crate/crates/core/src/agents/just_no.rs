use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{uniform_point, Action, AgentConfig, AgentError, AgentState, BeliefSnapshot, IngestReport, Strategy};
use crate::domain::{BehaviourPoint, Lexicon, Situation, Utterance};
use crate::inference::MannerOption;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JustNoParams {
    /// Two situations match when they share a shape and their colours are
    /// at most this far apart in RGB.
    pub rgb_radius: f64,
    /// Fresh points closer than this to a corrected one are rejected.
    pub avoid_radius: f64,
    pub attempts: usize,
}

impl Default for JustNoParams {
    fn default() -> Self {
        JustNoParams {
            rgb_radius: 30.0,
            avoid_radius: 0.15,
            attempts: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub situation: Situation,
    pub point: BehaviourPoint,
    pub assent: bool,
}

/// Hears only "yes" or "no" and remembers single episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JustNo {
    params: JustNoParams,
    lexicon: Lexicon,
    records: Vec<EpisodeRecord>,
}

impl JustNo {
    pub fn new(config: &AgentConfig) -> Self {
        JustNo {
            params: config.just_no,
            lexicon: config.lexicon.clone(),
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[EpisodeRecord] {
        &self.records
    }

    fn matches(&self, a: &Situation, b: &Situation) -> bool {
        a.shape == b.shape && a.rgb.distance(&b.rgb) <= self.params.rgb_radius
    }
}

impl Strategy for JustNo {
    fn name(&self) -> &str {
        "just-no"
    }

    fn act(&mut self, situation: &Situation, rng: &mut dyn RngCore) -> Result<Action, AgentError> {
        let replay = self
            .records
            .iter()
            .rev()
            .find(|r| r.assent && self.matches(&r.situation, situation));
        if let Some(r) = replay {
            return Ok(Action {
                point: r.point,
                option: None,
            });
        }
        let avoid: Vec<&BehaviourPoint> = self
            .records
            .iter()
            .filter(|r| !r.assent && self.matches(&r.situation, situation))
            .map(|r| &r.point)
            .collect();
        let mut point = uniform_point(rng);
        for _ in 1..self.params.attempts {
            if avoid.iter().all(|q| q.distance(&point) >= self.params.avoid_radius) {
                break;
            }
            point = uniform_point(rng);
        }
        Ok(Action { point, option: None })
    }

    fn ingest(
        &mut self,
        situation: &Situation,
        point: &BehaviourPoint,
        utterance: &Utterance,
        _chosen: Option<&MannerOption>,
    ) -> Result<IngestReport, AgentError> {
        self.records.push(EpisodeRecord {
            situation: situation.clone(),
            point: *point,
            assent: utterance.is_assent(),
        });
        Ok(IngestReport {
            applied: true,
            ..Default::default()
        })
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn snapshot(&self) -> BeliefSnapshot {
        BeliefSnapshot {
            strategy: self.name().to_string(),
            episodic_records: self.records.len(),
            ..Default::default()
        }
    }

    fn export_state(&self) -> AgentState {
        AgentState::JustNo(self.clone())
    }
}
