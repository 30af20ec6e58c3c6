//! Learning which manner of action execution each context requires.
//!
//! An agent observes a coloured shape, picks a point in a three-dimensional
//! behaviour space (speed, energy, direction) and receives feedback from a
//! teacher: `"yes"`, a full correction naming the context
//! (`"no, when you see red squares do it gently"`) or a partial one
//! (`"no, do it quickly"`). From that feedback it learns
//!
//! - rule beliefs `body -> adverb` ([`rules`]),
//! - colour groundings over raw RGB ([`grounding`]),
//! - where each adverb lives on its behaviour dimension ([`behaviour`]),
//!
//! and combines them in a Bayes net that grows as new words are heard
//! ([`inference`]). [`agents`] wraps the learner and the baselines behind one
//! trait, [`world`] simulates the teacher and [`experiment`] measures regret.

pub mod acceptance;
pub mod agents;
pub mod behaviour;
pub mod domain;
pub mod experiment;
pub mod grounding;
pub mod inference;
pub mod rules;
pub mod world;

pub use agents::{Action, Strategy, StrategyRegistry};
pub use domain::{BehaviourPoint, Dimension, Lexicon, Rgb, Rule, RuleBody, Shape, Situation, Utterance};
