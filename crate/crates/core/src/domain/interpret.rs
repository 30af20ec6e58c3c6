use serde::{Deserialize, Serialize};

use super::{BehaviourPoint, Lexicon, Rgb, Rule, RuleBody, Situation, Utterance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpretError {
    #[error("adverb '{0}' has no declared behaviour dimension")]
    UnknownAdverb(String),
}

/// What a coherent reading of one utterance licenses the learner to update.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvidenceBundle {
    pub grounding_exemplars: Vec<(String, f64, Rgb)>,
    pub confirmed_rules: Vec<Rule>,
    pub rule_hypotheses: Vec<(Rule, f64)>,
    pub negative_adverb_exemplars: Vec<(String, f64)>,
    pub assent: bool,
}

/// Turns an utterance about the action `point` performed in `situation`
/// into learning evidence.
///
/// A correction is only coherent if it is relevant to the latest action and
/// denies part of it: a full correction states a context that holds now,
/// and every mentioned adverb was not satisfied by `point`. A partial
/// correction leaves the context open, so every rule the observed shape and
/// the known colours could form becomes a hypothesis, weighted by how
/// likely its body is to hold.
pub fn interpret(
    utterance: &Utterance,
    situation: &Situation,
    point: &BehaviourPoint,
    lexicon: &Lexicon,
    known_colours: &[String],
    colour_posterior: impl Fn(&str, &Rgb) -> f64,
) -> Result<EvidenceBundle, InterpretError> {
    let mut bundle = EvidenceBundle::default();
    let negatives = |adverbs: &[String]| -> Result<Vec<(String, f64)>, InterpretError> {
        adverbs
            .iter()
            .map(|a| {
                lexicon
                    .dimension_of(a)
                    .map(|d| (a.clone(), point.get(d)))
                    .ok_or_else(|| InterpretError::UnknownAdverb(a.clone()))
            })
            .collect()
    };

    match utterance {
        Utterance::Assent => bundle.assent = true,
        Utterance::FullCorrection { body, adverbs } => {
            bundle.negative_adverb_exemplars = negatives(adverbs)?;
            if let Some(colour) = body.colour_atom() {
                bundle
                    .grounding_exemplars
                    .push((colour.to_string(), 1.0, situation.rgb));
            }
            bundle.confirmed_rules = adverbs.iter().map(|a| Rule::new(body.clone(), a.clone())).collect();
        }
        Utterance::PartialCorrection { adverbs } => {
            bundle.negative_adverb_exemplars = negatives(adverbs)?;
            for adverb in adverbs {
                bundle
                    .rule_hypotheses
                    .push((Rule::new(RuleBody::shape(situation.shape.clone()), adverb.clone()), 1.0));
                for colour in known_colours {
                    let w = colour_posterior(colour, &situation.rgb);
                    bundle
                        .rule_hypotheses
                        .push((Rule::new(RuleBody::colour(colour.clone()), adverb.clone()), w));
                    bundle.rule_hypotheses.push((
                        Rule::new(
                            RuleBody::colour_and_shape(colour.clone(), situation.shape.clone()),
                            adverb.clone(),
                        ),
                        w,
                    ));
                }
            }
        }
    }
    Ok(bundle)
}
