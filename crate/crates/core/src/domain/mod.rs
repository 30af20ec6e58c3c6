//! Core value types, the teacher utterance grammar and its interpretation.

mod grammar;
mod interpret;

pub use grammar::{parse_utterance, plural, render_utterance, GrammarError, Lexicon, Parsed};
pub use interpret::{interpret, EvidenceBundle, InterpretError};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A shape label. Which labels are valid is decided by the [`Lexicon`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape(String);

impl Shape {
    pub fn new(name: impl Into<String>) -> Self {
        Shape(name.into().to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Raw colour observation. `u8` channels keep every value inside `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    pub fn channels(&self) -> [f64; 3] {
        [self.r as f64, self.g as f64, self.b as f64]
    }

    pub fn squared_distance(&self, other: &Rgb) -> f64 {
        let a = self.channels();
        let b = other.channels();
        a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    pub fn distance(&self, other: &Rgb) -> f64 {
        self.squared_distance(other).sqrt()
    }
}

/// One observed context: a recognised shape plus its raw colour.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Situation {
    pub shape: Shape,
    pub rgb: Rgb,
}

impl Situation {
    pub fn new(shape: Shape, rgb: Rgb) -> Self {
        Situation { shape, rgb }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Speed,
    Energy,
    Direction,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::Speed, Dimension::Energy, Dimension::Direction];

    pub fn as_str(&self) -> &'static str {
        match self {
            Dimension::Speed => "speed",
            Dimension::Energy => "energy",
            Dimension::Direction => "direction",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "speed" => Ok(Dimension::Speed),
            "energy" => Ok(Dimension::Energy),
            "direction" => Ok(Dimension::Direction),
            other => Err(format!("unknown behaviour dimension '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("behaviour coordinate {0} is outside [0, 1]")]
pub struct OutOfRange(pub f64);

/// A point in behaviour space; every coordinate lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviourPoint {
    speed: f64,
    energy: f64,
    direction: f64,
}

impl BehaviourPoint {
    pub fn new(speed: f64, energy: f64, direction: f64) -> Result<Self, OutOfRange> {
        for v in [speed, energy, direction] {
            if !(0.0..=1.0).contains(&v) {
                return Err(OutOfRange(v));
            }
        }
        Ok(BehaviourPoint {
            speed,
            energy,
            direction,
        })
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    pub fn get(&self, dim: Dimension) -> f64 {
        match dim {
            Dimension::Speed => self.speed,
            Dimension::Energy => self.energy,
            Dimension::Direction => self.direction,
        }
    }

    pub fn distance(&self, other: &BehaviourPoint) -> f64 {
        Dimension::ALL
            .iter()
            .map(|&d| (self.get(d) - other.get(d)).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// An adverb and the single behaviour dimension it constrains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdverbConcept {
    pub name: String,
    pub dimension: Dimension,
}

/// Rule body: a colour, a shape, or both.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RuleBody {
    colour: Option<String>,
    shape: Option<Shape>,
}

impl RuleBody {
    pub fn colour(colour: impl Into<String>) -> Self {
        RuleBody {
            colour: Some(colour.into()),
            shape: None,
        }
    }

    pub fn shape(shape: Shape) -> Self {
        RuleBody {
            colour: None,
            shape: Some(shape),
        }
    }

    pub fn colour_and_shape(colour: impl Into<String>, shape: Shape) -> Self {
        RuleBody {
            colour: Some(colour.into()),
            shape: Some(shape),
        }
    }

    /// `None` when both atoms are missing.
    pub fn from_parts(colour: Option<String>, shape: Option<Shape>) -> Option<Self> {
        if colour.is_none() && shape.is_none() {
            None
        } else {
            Some(RuleBody { colour, shape })
        }
    }

    pub fn colour_atom(&self) -> Option<&str> {
        self.colour.as_deref()
    }

    pub fn shape_atom(&self) -> Option<&Shape> {
        self.shape.as_ref()
    }

    /// Probability that the body holds in `situation`: the shape atom is
    /// observed exactly, the colour atom through `colour_posterior`.
    pub fn match_probability(&self, situation: &Situation, colour_posterior: impl Fn(&str, &Rgb) -> f64) -> f64 {
        if let Some(shape) = &self.shape {
            if *shape != situation.shape {
                return 0.0;
            }
        }
        match &self.colour {
            Some(c) => colour_posterior(c, &situation.rgb),
            None => 1.0,
        }
    }
}

impl fmt::Display for RuleBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.colour, &self.shape) {
            (Some(c), Some(s)) => write!(f, "{c} & {s}"),
            (Some(c), None) => f.write_str(c),
            (None, Some(s)) => write!(f, "{s}"),
            (None, None) => f.write_str("?"),
        }
    }
}

/// `body -> head`, compared structurally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub body: RuleBody,
    pub head: String,
}

impl Rule {
    pub fn new(body: RuleBody, head: impl Into<String>) -> Self {
        Rule {
            body,
            head: head.into(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.body, self.head)
    }
}

/// The three utterance schemas a teacher can produce.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Utterance {
    Assent,
    FullCorrection { body: RuleBody, adverbs: Vec<String> },
    PartialCorrection { adverbs: Vec<String> },
}

impl Utterance {
    pub fn is_assent(&self) -> bool {
        matches!(self, Utterance::Assent)
    }

    pub fn adverbs(&self) -> &[String] {
        match self {
            Utterance::Assent => &[],
            Utterance::FullCorrection { adverbs, .. } | Utterance::PartialCorrection { adverbs } => adverbs,
        }
    }

    pub fn kind(&self) -> UtteranceKind {
        match self {
            Utterance::Assent => UtteranceKind::Assent,
            Utterance::FullCorrection { .. } => UtteranceKind::Full,
            Utterance::PartialCorrection { .. } => UtteranceKind::Partial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtteranceKind {
    Assent,
    Full,
    Partial,
}

impl fmt::Display for UtteranceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtteranceKind::Assent => "assent",
            UtteranceKind::Full => "full",
            UtteranceKind::Partial => "partial",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn behaviour_point_rejects_out_of_range() {
        assert!(BehaviourPoint::new(0.0, 1.0, 0.5).is_ok());
        assert_eq!(BehaviourPoint::new(1.5, 0.0, 0.0), Err(OutOfRange(1.5)));
        assert!(BehaviourPoint::new(0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn empty_body_is_rejected() {
        assert!(RuleBody::from_parts(None, None).is_none());
        assert!(RuleBody::from_parts(Some("red".into()), None).is_some());
    }

    #[test]
    fn body_match_uses_shape_and_posterior() {
        let s = Situation::new(Shape::new("square"), Rgb::new(200, 20, 20));
        let post = |_: &str, _: &Rgb| 0.6;
        assert_eq!(RuleBody::shape(Shape::new("square")).match_probability(&s, post), 1.0);
        assert_eq!(RuleBody::colour("red").match_probability(&s, post), 0.6);
        assert_eq!(
            RuleBody::colour_and_shape("red", Shape::new("circle")).match_probability(&s, post),
            0.0
        );
    }
}
