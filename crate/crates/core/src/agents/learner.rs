use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    Action, AdverbView, AgentConfig, AgentError, AgentState, BeliefSnapshot, ColourView, IngestReport, LearnerParams,
    RuleView, Strategy,
};
use crate::behaviour::BehaviourModels;
use crate::domain::{interpret, AdverbConcept, BehaviourPoint, Lexicon, Rule, Situation, Utterance};
use crate::grounding::GroundingModel;
use crate::inference::{select_point, sync_structure, MannerModel, MannerOption, NetSnapshot, NetStructure};
use crate::rules::RuleStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    Full,
    /// Ignores every "yes".
    NoAssent,
    /// Never records negative behaviour exemplars.
    NoNegative,
}

impl LearnerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LearnerKind::Full => "full",
            LearnerKind::NoAssent => "no-assent",
            LearnerKind::NoNegative => "no-negative",
        }
    }
}

/// The full agent and its two ablations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Learner {
    kind: LearnerKind,
    params: LearnerParams,
    lexicon: Lexicon,
    grounding: GroundingModel,
    rules: RuleStore,
    behaviour: BehaviourModels,
    structure: NetStructure,
}

impl Learner {
    pub fn new(kind: LearnerKind, config: &AgentConfig) -> Self {
        let p = config.learner;
        let grounding = GroundingModel::new(p.colour_prior, p.colour_bandwidth);
        let rules = RuleStore::new(p.alpha0, p.beta0);
        let structure = sync_structure(&rules, &grounding.known_colours(), &config.lexicon);
        Learner {
            kind,
            params: p,
            lexicon: config.lexicon.clone(),
            grounding,
            rules,
            behaviour: BehaviourModels::new(p.behaviour),
            structure,
        }
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn grounding(&self) -> &GroundingModel {
        &self.grounding
    }

    pub fn grounding_mut(&mut self) -> &mut GroundingModel {
        &mut self.grounding
    }

    pub fn rules(&self) -> &RuleStore {
        &self.rules
    }

    pub fn rules_mut(&mut self) -> &mut RuleStore {
        &mut self.rules
    }

    pub fn behaviour(&self) -> &BehaviourModels {
        &self.behaviour
    }

    pub fn structure(&self) -> &NetStructure {
        &self.structure
    }

    pub fn sync(&mut self) {
        if !self.structure.is_current(&self.rules, &self.grounding) {
            self.structure = sync_structure(&self.rules, &self.grounding.known_colours(), &self.lexicon);
        }
    }

    fn model(&self) -> MannerModel<'_> {
        MannerModel {
            grounding: &self.grounding,
            rules: &self.rules,
            leak: self.params.leak,
        }
    }

    fn ensure_adverb(&mut self, adverb: &str) -> Result<(), AgentError> {
        let dimension = self
            .lexicon
            .dimension_of(adverb)
            .ok_or_else(|| crate::domain::InterpretError::UnknownAdverb(adverb.to_string()))?;
        self.lexicon.mark_introduced(adverb);
        self.behaviour.ensure(AdverbConcept {
            name: adverb.to_string(),
            dimension,
        });
        Ok(())
    }

    /// Vocabulary growth: colour words get a classifier, adverbs a generator.
    fn learn_words(&mut self, utterance: &Utterance) -> Result<Vec<String>, AgentError> {
        let mut new_colours = Vec::new();
        if let Utterance::FullCorrection { body, .. } = utterance {
            if let Some(c) = body.colour_atom() {
                if !self.grounding.known_colours().iter().any(|k| k == c) {
                    new_colours.push(c.to_string());
                }
                self.lexicon.add_colour(c);
                self.grounding.ensure_colour(c);
            }
        }
        for a in utterance.adverbs() {
            self.ensure_adverb(a)?;
        }
        Ok(new_colours)
    }

    /// With the guard on, a value the adverb's own classifier already
    /// rejects is not added to its X+.
    fn accepts_positive(&self, adverb: &str, value: f64) -> bool {
        !self.params.guard_positives || self.behaviour.get(adverb).is_none_or(|m| m.goodness(value) >= 0.5)
    }

    /// Assent means no rule was violated. Rules that would have demanded a
    /// different adverb than the one realised lose belief, and confident
    /// matching rules lend the performed value to their adverb's X+.
    fn learn_from_assent(
        &mut self,
        situation: &Situation,
        point: &BehaviourPoint,
        chosen: Option<&MannerOption>,
        report: &mut IngestReport,
    ) -> Result<(), AgentError> {
        let grounding = &self.grounding;
        let matching = self.rules.rules_matching(situation, |c, x| grounding.posterior(c, x));
        let conflicts = |rule: &Rule| -> bool {
            let (Some(opt), Some(dim)) = (chosen, self.lexicon.dimension_of(&rule.head)) else {
                return false;
            };
            opt.adverb_on(dim).is_some_and(|a| a != rule.head)
        };

        let mut penalised = Vec::new();
        for (rule, m) in &matching {
            let confirmed = self.rules.get(rule).is_some_and(|b| b.confirmed);
            if *m > 0.0 && !confirmed && conflicts(rule) {
                penalised.push((rule.clone(), *m));
            }
        }
        let mut positives = Vec::new();
        for (rule, m) in &matching {
            if conflicts(rule) {
                continue;
            }
            let joint = self.rules.belief(rule) * m;
            let Some(dim) = self.lexicon.dimension_of(&rule.head) else {
                continue;
            };
            let value = point.get(dim);
            if joint > self.params.positive_threshold && self.accepts_positive(&rule.head, value) {
                positives.push((rule.head.clone(), value));
            }
        }
        for (rule, m) in &penalised {
            self.rules.add_negative(rule, m.min(1.0))?;
        }
        for (adverb, value) in &positives {
            self.ensure_adverb(adverb)?;
            self.behaviour.add_positive(adverb, *value)?;
        }
        report.penalised_rules = penalised;
        report.positive_exemplars = positives;
        Ok(())
    }
}

impl Strategy for Learner {
    fn name(&self) -> &str {
        self.kind.as_str()
    }

    fn act(&mut self, situation: &Situation, rng: &mut dyn RngCore) -> Result<Action, AgentError> {
        self.sync();
        let (option, _) = self.model().select_option(&self.structure, situation)?;
        let point = select_point(&option, &self.behaviour, rng)?;
        Ok(Action {
            point,
            option: Some(option),
        })
    }

    fn ingest(
        &mut self,
        situation: &Situation,
        point: &BehaviourPoint,
        utterance: &Utterance,
        chosen: Option<&MannerOption>,
    ) -> Result<IngestReport, AgentError> {
        let mut report = IngestReport::default();
        if utterance.is_assent() && self.kind == LearnerKind::NoAssent {
            return Ok(report);
        }
        report.applied = true;
        report.new_colours = self.learn_words(utterance)?;

        let known = self.grounding.known_colours();
        let grounding = &self.grounding;
        let bundle = interpret(utterance, situation, point, &self.lexicon, &known, |c, x| {
            grounding.posterior(c, x)
        })?;

        for (colour, w, rgb) in &bundle.grounding_exemplars {
            self.grounding.add_exemplar(colour, *w, *rgb)?;
        }
        for rule in &bundle.confirmed_rules {
            self.rules.confirm(rule);
        }
        for (rule, w) in &bundle.rule_hypotheses {
            if *w >= self.params.min_hypothesis_weight && *w > 0.0 {
                self.rules.add_positive(rule, w.min(1.0))?;
            }
        }
        if self.kind != LearnerKind::NoNegative {
            for (adverb, value) in &bundle.negative_adverb_exemplars {
                self.behaviour.add_negative(adverb, *value)?;
            }
        }
        if bundle.assent {
            self.learn_from_assent(situation, point, chosen, &mut report)?;
        }
        report.evidence = bundle;
        self.sync();
        Ok(report)
    }

    fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn snapshot(&self) -> BeliefSnapshot {
        BeliefSnapshot {
            strategy: self.name().to_string(),
            rules: self
                .rules
                .iter()
                .map(|b| RuleView {
                    rule: b.rule.to_string(),
                    alpha: b.alpha,
                    beta: b.beta,
                    confirmed: b.confirmed,
                    belief: b.belief(),
                })
                .collect(),
            colours: self
                .grounding
                .known_colours()
                .into_iter()
                .map(|c| ColourView {
                    exemplar_count: self.grounding.exemplars(&c).len(),
                    name: c,
                })
                .collect(),
            adverbs: self
                .behaviour
                .iter()
                .map(|m| AdverbView {
                    name: m.adverb().name.clone(),
                    dimension: m.dimension(),
                    mu: m.mu(),
                    sigma: m.sigma(),
                    pos_count: m.positives().len(),
                    neg_count: m.negatives().len(),
                })
                .collect(),
            net: NetSnapshot::describe(&self.structure, &self.rules, &self.grounding, self.params.leak),
            episodic_records: 0,
        }
    }

    fn export_state(&self) -> AgentState {
        AgentState::Learner(Box::new(self.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Dimension, Rgb, RuleBody, Shape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config() -> AgentConfig {
        AgentConfig::new(
            ["square", "circle", "triangle"].map(Shape::new),
            [
                ("gently".to_string(), Dimension::Energy),
                ("firmly".to_string(), Dimension::Energy),
                ("slowly".to_string(), Dimension::Speed),
                ("quickly".to_string(), Dimension::Speed),
            ],
        )
    }

    fn red_square() -> Situation {
        Situation::new(Shape::new("square"), Rgb::new(225, 25, 25))
    }

    fn pt(s: f64, e: f64, d: f64) -> BehaviourPoint {
        BehaviourPoint::new(s, e, d).unwrap()
    }

    fn full_correction() -> Utterance {
        Utterance::FullCorrection {
            body: RuleBody::colour_and_shape("red", Shape::new("square")),
            adverbs: vec!["gently".into(), "slowly".into()],
        }
    }

    #[test]
    fn full_correction_updates_every_model() {
        let mut l = Learner::new(LearnerKind::Full, &config());
        let report = l
            .ingest(&red_square(), &pt(0.9, 0.8, 0.5), &full_correction(), None)
            .unwrap();
        assert_eq!(report.new_colours, vec!["red"]);
        assert_eq!(l.grounding().exemplars("red").len(), 1);
        let rule = Rule::new(RuleBody::colour_and_shape("red", Shape::new("square")), "gently");
        assert_eq!(l.rules().belief(&rule), 1.0);
        assert_eq!(l.behaviour().get("gently").unwrap().negatives(), &[0.8]);
        assert_eq!(l.behaviour().get("slowly").unwrap().negatives(), &[0.9]);
        assert!(l.lexicon().knows_colour("red"));
        assert!(l.structure().manner_node("gently").is_some());
    }

    #[test]
    fn confirmed_rule_drives_action() {
        let mut l = Learner::new(LearnerKind::Full, &config());
        let s = red_square();
        for _ in 0..5 {
            l.ingest(&s, &pt(0.9, 0.9, 0.5), &full_correction(), None).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = l.act(&s, &mut rng).unwrap();
        let opt = a.option.unwrap();
        assert_eq!(opt.adverb_on(Dimension::Energy), Some("gently"));
        assert_eq!(opt.adverb_on(Dimension::Speed), Some("slowly"));
    }

    #[test]
    fn assent_gate_adds_positive_above_threshold() {
        let mut l = Learner::new(LearnerKind::Full, &config());
        let sq = Shape::new("square");
        let rule = Rule::new(RuleBody::shape(sq.clone()), "gently");
        l.rules_mut().add_positive(&rule, 1.0).unwrap();
        l.rules_mut().add_positive(&rule, 1.0).unwrap();
        let r = l
            .ingest(&red_square(), &pt(0.5, 0.2, 0.5), &Utterance::Assent, None)
            .unwrap();
        assert_eq!(r.positive_exemplars, vec![("gently".to_string(), 0.2)]);
        assert_eq!(l.behaviour().get("gently").unwrap().positives(), &[0.2]);
    }

    #[test]
    fn assent_penalises_rules_contradicting_the_choice() {
        let mut l = Learner::new(LearnerKind::Full, &config());
        let rule = Rule::new(RuleBody::shape(Shape::new("square")), "quickly");
        l.rules_mut().add_positive(&rule, 1.0).unwrap();
        let slow = MannerOption::empty().with(Dimension::Speed, "slowly");
        let r = l
            .ingest(&red_square(), &pt(0.1, 0.5, 0.5), &Utterance::Assent, Some(&slow))
            .unwrap();
        assert_eq!(r.penalised_rules, vec![(rule.clone(), 1.0)]);
        assert!((l.rules().belief(&rule) - 0.5).abs() < 1e-12);
        assert!(r.positive_exemplars.is_empty());
    }

    #[test]
    fn no_assent_ignores_yes() {
        let mut l = Learner::new(LearnerKind::NoAssent, &config());
        let rule = Rule::new(RuleBody::shape(Shape::new("square")), "gently");
        l.rules_mut().confirm(&rule);
        let before = l.clone();
        let r = l
            .ingest(&red_square(), &pt(0.5, 0.2, 0.5), &Utterance::Assent, None)
            .unwrap();
        assert!(!r.applied);
        assert_eq!(l, before);
    }

    #[test]
    fn no_negative_keeps_rules_but_drops_negatives() {
        let mut l = Learner::new(LearnerKind::NoNegative, &config());
        let u = Utterance::PartialCorrection {
            adverbs: vec!["quickly".into()],
        };
        l.ingest(&red_square(), &pt(0.1, 0.5, 0.5), &u, None).unwrap();
        let rule = Rule::new(RuleBody::shape(Shape::new("square")), "quickly");
        assert!((l.rules().belief(&rule) - 2.0 / 3.0).abs() < 1e-12);
        assert!(l.behaviour().get("quickly").unwrap().negatives().is_empty());
    }

    #[test]
    fn state_round_trips_through_toml() {
        let mut l = Learner::new(LearnerKind::Full, &config());
        l.ingest(&red_square(), &pt(0.9, 0.8, 0.5), &full_correction(), None)
            .unwrap();
        let state = l.export_state();
        let text = toml::to_string(&state).unwrap();
        let back: AgentState = toml::from_str(&text).unwrap();
        assert_eq!(back, state);
    }
}
