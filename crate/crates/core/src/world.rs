//! The simulated world and its teacher.
//!
//! The teacher knows every constraint. After each action it either assents
//! or corrects one group of violated rules that share a body, naming only
//! adverbs that were actually violated. Rules marked `partial` are corrected
//! without stating the context.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::AgentConfig;
use crate::domain::{BehaviourPoint, Dimension, Rgb, Rule, RuleBody, Shape, Situation, Utterance};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown preset '{0}' (expected fully-expressed or partial)")]
    UnknownPreset(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColourDef {
    pub name: String,
    pub r: [u8; 2],
    pub g: [u8; 2],
    pub b: [u8; 2],
}

impl ColourDef {
    pub fn contains(&self, x: &Rgb) -> bool {
        let inside = |v: u8, [lo, hi]: [u8; 2]| lo <= v && v <= hi;
        inside(x.r, self.r) && inside(x.g, self.g) && inside(x.b, self.b)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rgb {
        Rgb::new(
            rng.random_range(self.r[0]..=self.r[1]),
            rng.random_range(self.g[0]..=self.g[1]),
            rng.random_range(self.b[0]..=self.b[1]),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdverbDef {
    pub name: String,
    pub dimension: Dimension,
    pub interval: [f64; 2],
}

impl AdverbDef {
    pub fn contains(&self, value: f64) -> bool {
        self.interval[0] <= value && value <= self.interval[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Full,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    pub head: String,
    pub policy: Policy,
}

/// Scenario parameters plus the ground truth, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WorldConfig {
    #[serde(default = "default_fraction")]
    pub constrained_fraction: f64,
    #[serde(default = "default_situations")]
    pub situations_per_trial: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub shapes: Vec<String>,
    pub colours: Vec<ColourDef>,
    pub adverbs: Vec<AdverbDef>,
    pub rules: Vec<RuleDef>,
}

fn default_fraction() -> f64 {
    0.9
}

fn default_situations() -> usize {
    100
}

fn default_trials() -> usize {
    5
}

/// Validated, immutable view of the constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    shapes: Vec<Shape>,
    colours: Vec<ColourDef>,
    adverbs: Vec<AdverbDef>,
    rules: Vec<(Rule, Policy)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioConfig {
    pub constrained_fraction: f64,
    pub situations_per_trial: usize,
    pub trials: usize,
    pub seed: u64,
}

impl WorldConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: WorldConfig = toml::from_str(text)?;
        cfg.ground_truth()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// `fully-expressed` or `partial`.
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        match name {
            "fully-expressed" | "fully_expressed" | "default" => Ok(Self::fully_expressed()),
            "partial" => Ok(Self::partial()),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is plain data")
    }

    pub fn scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            constrained_fraction: self.constrained_fraction,
            situations_per_trial: self.situations_per_trial,
            trials: self.trials,
            seed: self.seed,
        }
    }

    pub fn ground_truth(&self) -> Result<GroundTruth, ConfigError> {
        if !(0.0..=1.0).contains(&self.constrained_fraction) {
            return invalid(format!(
                "constrainedFraction {} outside [0, 1]",
                self.constrained_fraction
            ));
        }
        if self.situations_per_trial == 0 {
            return invalid("situationsPerTrial must be positive");
        }
        if self.shapes.is_empty() {
            return invalid("no shapes");
        }
        let shapes: Vec<Shape> = self.shapes.iter().map(Shape::new).collect();
        if shapes.iter().collect::<BTreeSet<_>>().len() != shapes.len() {
            return invalid("duplicate shape");
        }
        let mut colour_names = BTreeSet::new();
        for c in &self.colours {
            if !colour_names.insert(c.name.as_str()) {
                return invalid(format!("duplicate colour '{}'", c.name));
            }
            if [c.r, c.g, c.b].iter().any(|[lo, hi]| lo > hi) {
                return invalid(format!("colour '{}' has an empty channel range", c.name));
            }
        }
        let mut adverb_names = BTreeSet::new();
        for a in &self.adverbs {
            if !adverb_names.insert(a.name.as_str()) {
                return invalid(format!("duplicate adverb '{}'", a.name));
            }
            let [lo, hi] = a.interval;
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return invalid(format!("adverb '{}' interval must lie in [0, 1]", a.name));
            }
        }
        for (i, a) in self.adverbs.iter().enumerate() {
            for b in &self.adverbs[i + 1..] {
                let overlap = a.interval[0] <= b.interval[1] && b.interval[0] <= a.interval[1];
                if a.dimension == b.dimension && overlap {
                    return invalid(format!(
                        "adverbs '{}' and '{}' overlap on {}",
                        a.name, b.name, a.dimension
                    ));
                }
            }
        }
        if self.rules.is_empty() {
            return invalid("no rules");
        }
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            if let Some(c) = &r.colour {
                if !colour_names.contains(c.as_str()) {
                    return invalid(format!("rule uses undefined colour '{c}'"));
                }
            }
            let shape = r.shape.as_ref().map(Shape::new);
            if let Some(s) = &shape {
                if !shapes.contains(s) {
                    return invalid(format!("rule uses undefined shape '{s}'"));
                }
            }
            if !adverb_names.contains(r.head.as_str()) {
                return invalid(format!("rule uses undefined adverb '{}'", r.head));
            }
            let Some(body) = RuleBody::from_parts(r.colour.clone(), shape) else {
                return invalid(format!("rule for '{}' has an empty body", r.head));
            };
            rules.push((Rule::new(body, r.head.clone()), r.policy));
        }
        let dim_of = |h: &str| self.adverbs.iter().find(|a| a.name == h).map(|a| a.dimension);
        for (i, (a, _)) in rules.iter().enumerate() {
            for (b, _) in &rules[i + 1..] {
                if a.body == b.body && dim_of(&a.head) == dim_of(&b.head) {
                    return invalid(format!("rules '{a}' and '{b}' constrain the same dimension"));
                }
            }
        }
        let full_colours: BTreeSet<&str> = rules
            .iter()
            .filter(|(_, p)| *p == Policy::Full)
            .filter_map(|(r, _)| r.body.colour_atom())
            .collect();
        for (r, p) in &rules {
            if let (Policy::Partial, Some(c)) = (p, r.body.colour_atom()) {
                if !full_colours.contains(c) {
                    return invalid(format!(
                        "colour '{c}' of partially expressed rule '{r}' never appears in a fully expressed rule"
                    ));
                }
            }
        }
        Ok(GroundTruth {
            shapes,
            colours: self.colours.clone(),
            adverbs: self.adverbs.clone(),
            rules,
        })
    }

    fn base(rules: Vec<RuleDef>) -> Self {
        let colour = |name: &str, r, g, b| ColourDef {
            name: name.into(),
            r,
            g,
            b,
        };
        let adverb = |name: &str, dimension, interval| AdverbDef {
            name: name.into(),
            dimension,
            interval,
        };
        WorldConfig {
            constrained_fraction: default_fraction(),
            situations_per_trial: default_situations(),
            trials: default_trials(),
            seed: 0,
            shapes: vec!["square".into(), "circle".into(), "triangle".into()],
            colours: vec![
                colour("red", [170, 255], [0, 80], [0, 80]),
                colour("green", [0, 80], [170, 255], [0, 80]),
                colour("blue", [0, 80], [0, 80], [170, 255]),
            ],
            adverbs: vec![
                adverb("slowly", Dimension::Speed, [0.0, 0.4]),
                adverb("quickly", Dimension::Speed, [0.6, 1.0]),
                adverb("gently", Dimension::Energy, [0.0, 0.4]),
                adverb("firmly", Dimension::Energy, [0.6, 1.0]),
            ],
            rules,
        }
    }

    /// Every rule corrected with its full context.
    pub fn fully_expressed() -> Self {
        Self::base(vec![
            rule(Some("red"), Some("square"), "gently", Policy::Full),
            rule(Some("red"), Some("square"), "slowly", Policy::Full),
            rule(Some("blue"), None, "quickly", Policy::Full),
            rule(Some("green"), Some("circle"), "firmly", Policy::Full),
        ])
    }

    /// One rule is only ever corrected partially; its colour is taught
    /// elsewhere through full corrections.
    pub fn partial() -> Self {
        Self::base(vec![
            rule(Some("red"), Some("square"), "gently", Policy::Full),
            rule(Some("red"), Some("square"), "slowly", Policy::Full),
            rule(Some("blue"), Some("triangle"), "firmly", Policy::Full),
            rule(Some("blue"), None, "quickly", Policy::Partial),
        ])
    }

    /// The agent knows the shapes and where each adverb lives, not the
    /// colours.
    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig::new(
            self.shapes.iter().map(Shape::new),
            self.adverbs.iter().map(|a| (a.name.clone(), a.dimension)),
        )
    }
}

fn rule(colour: Option<&str>, shape: Option<&str>, head: &str, policy: Policy) -> RuleDef {
    RuleDef {
        colour: colour.map(String::from),
        shape: shape.map(String::from),
        head: head.into(),
        policy,
    }
}

impl GroundTruth {
    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn colours(&self) -> &[ColourDef] {
        &self.colours
    }

    pub fn adverbs(&self) -> &[AdverbDef] {
        &self.adverbs
    }

    pub fn rules(&self) -> &[(Rule, Policy)] {
        &self.rules
    }

    pub fn adverb(&self, name: &str) -> Option<&AdverbDef> {
        self.adverbs.iter().find(|a| a.name == name)
    }

    pub fn colour(&self, name: &str) -> Option<&ColourDef> {
        self.colours.iter().find(|c| c.name == name)
    }

    pub fn body_holds(&self, body: &RuleBody, s: &Situation) -> bool {
        body.shape_atom().is_none_or(|sh| *sh == s.shape)
            && body
                .colour_atom()
                .is_none_or(|c| self.colour(c).is_some_and(|d| d.contains(&s.rgb)))
    }

    pub fn generate_situation<R: Rng + ?Sized>(&self, constrained_fraction: f64, rng: &mut R) -> Situation {
        if rng.random_bool(constrained_fraction) {
            let (rule, _) = self.rules.choose(rng).expect("validated: at least one rule");
            let shape = match rule.body.shape_atom() {
                Some(s) => s.clone(),
                None => self.shapes.choose(rng).expect("validated: shapes").clone(),
            };
            let colour = match rule.body.colour_atom() {
                Some(c) => self.colour(c).expect("validated: rule colours defined"),
                None => self
                    .colours
                    .choose(rng)
                    .expect("a colour-free rule still needs a colour"),
            };
            Situation::new(shape, colour.sample(rng))
        } else {
            let shape = self.shapes.choose(rng).expect("validated: shapes").clone();
            Situation::new(shape, Rgb::new(rng.random(), rng.random(), rng.random()))
        }
    }

    /// Rules whose context holds but whose adverb `point` misses.
    pub fn violations(&self, s: &Situation, point: &BehaviourPoint) -> Vec<&Rule> {
        self.rules
            .iter()
            .map(|(r, _)| r)
            .filter(|r| self.body_holds(&r.body, s))
            .filter(|r| {
                let a = self.adverb(&r.head).expect("validated: rule heads defined");
                !a.contains(point.get(a.dimension))
            })
            .collect()
    }

    pub fn give_feedback(&self, s: &Situation, point: &BehaviourPoint) -> Utterance {
        let violated = self.violations(s, point);
        let Some(first) = violated.first() else {
            return Utterance::Assent;
        };
        let group: Vec<&Rule> = violated.iter().copied().filter(|r| r.body == first.body).collect();
        let adverbs: Vec<String> = group.iter().map(|r| r.head.clone()).collect();
        let all_full = group
            .iter()
            .all(|r| self.rules.iter().any(|(x, p)| x == *r && *p == Policy::Full));
        if all_full {
            Utterance::FullCorrection {
                body: first.body.clone(),
                adverbs,
            }
        } else {
            Utterance::PartialCorrection { adverbs }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(s: f64, e: f64, d: f64) -> BehaviourPoint {
        BehaviourPoint::new(s, e, d).unwrap()
    }

    fn red_square() -> Situation {
        Situation::new(Shape::new("square"), Rgb::new(200, 40, 40))
    }

    #[test]
    fn presets_validate() {
        WorldConfig::fully_expressed().ground_truth().unwrap();
        WorldConfig::partial().ground_truth().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = WorldConfig::partial();
        let back = WorldConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn shipped_config_files_match_presets() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config");
        assert_eq!(
            WorldConfig::load(dir.join("fully_expressed.toml")).unwrap(),
            WorldConfig::fully_expressed()
        );
        assert_eq!(
            WorldConfig::load(dir.join("partial.toml")).unwrap(),
            WorldConfig::partial()
        );
    }

    #[test]
    fn rejects_overlapping_adverbs() {
        let mut cfg = WorldConfig::fully_expressed();
        cfg.adverbs[1].interval = [0.3, 1.0];
        assert!(matches!(cfg.ground_truth(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_partial_colour_never_taught() {
        let mut cfg = WorldConfig::fully_expressed();
        cfg.rules[2].policy = Policy::Partial;
        let err = cfg.ground_truth().unwrap_err();
        assert!(err.to_string().contains("blue"), "{err}");
    }

    #[test]
    fn rejects_undefined_atoms() {
        let mut cfg = WorldConfig::fully_expressed();
        cfg.rules[0].colour = Some("mauve".into());
        assert!(cfg.ground_truth().is_err());
        let mut cfg = WorldConfig::fully_expressed();
        cfg.rules[0].head = "sideways".into();
        assert!(cfg.ground_truth().is_err());
        let mut cfg = WorldConfig::fully_expressed();
        cfg.constrained_fraction = 1.5;
        assert!(cfg.ground_truth().is_err());
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(WorldConfig::preset("x"), Err(ConfigError::UnknownPreset(_))));
    }

    #[test]
    fn fully_constrained_single_rule_gives_red_squares() {
        let mut cfg = WorldConfig::fully_expressed();
        cfg.rules.truncate(1);
        let gt = cfg.ground_truth().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let red = gt.colour("red").unwrap().clone();
        for _ in 0..500 {
            let s = gt.generate_situation(1.0, &mut rng);
            assert_eq!(s.shape, Shape::new("square"));
            assert!(red.contains(&s.rgb));
        }
    }

    #[test]
    fn unconstrained_shapes_are_uniform() {
        let gt = WorldConfig::fully_expressed().ground_truth().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let s = gt.generate_situation(0.0, &mut rng);
            counts[gt.shapes().iter().position(|x| *x == s.shape).unwrap()] += 1;
        }
        let expected = n as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi-square with 2 degrees of freedom
        assert!(chi2 < 13.82, "{counts:?}");
    }

    #[test]
    fn default_fraction_mostly_constrained() {
        let cfg = WorldConfig::fully_expressed();
        let gt = cfg.ground_truth().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hits = (0..10_000)
            .filter(|_| {
                let s = gt.generate_situation(cfg.constrained_fraction, &mut rng);
                gt.rules().iter().any(|(r, _)| gt.body_holds(&r.body, &s))
            })
            .count();
        assert!(hits >= 9_000, "{hits}");
    }

    #[test]
    fn violation_examples() {
        let gt = WorldConfig::fully_expressed().ground_truth().unwrap();
        let v = gt.violations(&red_square(), &pt(0.2, 0.9, 0.5));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].head, "gently");
        assert!(gt.violations(&red_square(), &pt(0.2, 0.2, 0.5)).is_empty());
        let v = gt.violations(&red_square(), &pt(0.9, 0.2, 0.5));
        assert_eq!(v.iter().map(|r| r.head.as_str()).collect::<Vec<_>>(), vec!["slowly"]);
    }

    #[test]
    fn feedback_examples() {
        let gt = WorldConfig::fully_expressed().ground_truth().unwrap();
        assert_eq!(gt.give_feedback(&red_square(), &pt(0.1, 0.1, 0.9)), Utterance::Assent);
        assert_eq!(
            gt.give_feedback(&red_square(), &pt(0.9, 0.9, 0.5)),
            Utterance::FullCorrection {
                body: RuleBody::colour_and_shape("red", Shape::new("square")),
                adverbs: vec!["gently".into(), "slowly".into()],
            }
        );
        let partial = WorldConfig::partial().ground_truth().unwrap();
        let blue_circle = Situation::new(Shape::new("circle"), Rgb::new(10, 10, 220));
        assert_eq!(
            partial.give_feedback(&blue_circle, &pt(0.1, 0.5, 0.5)),
            Utterance::PartialCorrection {
                adverbs: vec!["quickly".into()]
            }
        );
    }

    #[test]
    fn same_seed_same_stream() {
        let gt = WorldConfig::fully_expressed().ground_truth().unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| gt.generate_situation(0.9, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(4), draw(4));
        assert_ne!(draw(4), draw(5));
    }
}
