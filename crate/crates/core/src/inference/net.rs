use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::factor::DiscreteNet;
use crate::behaviour::{BehaviourError, BehaviourModels};
use crate::domain::{BehaviourPoint, Dimension, Lexicon, Situation};
use crate::grounding::GroundingModel;
use crate::rules::RuleStore;

/// Probability that a manner node is on when none of its rules fire.
pub const DEFAULT_LEAK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferenceError {
    #[error("net structure is stale; re-sync after the rule store or colour vocabulary changed")]
    UnsyncedStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MannerNode {
    pub adverb: String,
    pub dimension: Dimension,
    pub colour_parents: BTreeSet<String>,
    pub shape_parent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetStructure {
    colour_nodes: Vec<String>,
    manner_nodes: BTreeMap<String, MannerNode>,
    rule_revision: u64,
    colour_count: usize,
}

/// Which adverb (if any) to realise on each dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MannerOption {
    pub chosen: BTreeMap<Dimension, String>,
}

impl MannerOption {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with(mut self, dim: Dimension, adverb: impl Into<String>) -> Self {
        self.chosen.insert(dim, adverb.into());
        self
    }

    pub fn adverb_on(&self, dim: Dimension) -> Option<&str> {
        self.chosen.get(&dim).map(String::as_str)
    }

    pub fn contains(&self, adverb: &str) -> bool {
        self.chosen.values().any(|a| a == adverb)
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// Tie-break key: fewer adverbs first, then adverb names.
    fn order_key(&self) -> (usize, Vec<&str>) {
        let mut names: Vec<&str> = self.chosen.values().map(String::as_str).collect();
        names.sort_unstable();
        (names.len(), names)
    }
}

/// Builds the structure implied by the current vocabulary and rule store.
pub fn sync_structure(rules: &RuleStore, colours: &[String], lexicon: &Lexicon) -> NetStructure {
    let mut manner_nodes: BTreeMap<String, MannerNode> = BTreeMap::new();
    for belief in rules.iter() {
        let rule = &belief.rule;
        let Some(dimension) = lexicon.dimension_of(&rule.head) else {
            continue;
        };
        let node = manner_nodes.entry(rule.head.clone()).or_insert_with(|| MannerNode {
            adverb: rule.head.clone(),
            dimension,
            colour_parents: BTreeSet::new(),
            shape_parent: false,
        });
        if let Some(c) = rule.body.colour_atom() {
            node.colour_parents.insert(c.to_string());
        }
        if rule.body.shape_atom().is_some() {
            node.shape_parent = true;
        }
    }
    NetStructure {
        colour_nodes: colours.to_vec(),
        manner_nodes,
        rule_revision: rules.revision(),
        colour_count: colours.len(),
    }
}

impl NetStructure {
    pub fn colour_nodes(&self) -> &[String] {
        &self.colour_nodes
    }

    pub fn manner_nodes(&self) -> impl Iterator<Item = &MannerNode> {
        self.manner_nodes.values()
    }

    pub fn manner_node(&self, adverb: &str) -> Option<&MannerNode> {
        self.manner_nodes.get(adverb)
    }

    pub fn is_current(&self, rules: &RuleStore, grounding: &GroundingModel) -> bool {
        self.rule_revision == rules.revision() && self.colour_count == grounding.known_colours().len()
    }

    /// Every edge as `(parent, child)` node ids.
    pub fn edges(&self) -> Vec<(String, String)> {
        let mut edges: Vec<(String, String)> = self
            .colour_nodes
            .iter()
            .map(|c| ("F(s)".to_string(), format!("colour:{c}")))
            .collect();
        for node in self.manner_nodes.values() {
            let target = format!("manner:{}", node.adverb);
            if node.shape_parent {
                edges.push(("S".to_string(), target.clone()));
            }
            for c in &node.colour_parents {
                edges.push((format!("colour:{c}"), target.clone()));
            }
            edges.push((target, format!("behaviour:{}", node.dimension)));
        }
        edges
    }

    /// Enumerates the manner options: on each dimension either nothing or
    /// one of the adverbs with a manner node on it.
    pub fn options(&self) -> Vec<MannerOption> {
        let mut by_dim: BTreeMap<Dimension, Vec<&str>> = BTreeMap::new();
        for node in self.manner_nodes.values() {
            by_dim.entry(node.dimension).or_default().push(&node.adverb);
        }
        enumerate_options(&by_dim)
    }
}

pub fn enumerate_options(by_dim: &BTreeMap<Dimension, Vec<&str>>) -> Vec<MannerOption> {
    let mut options = vec![MannerOption::empty()];
    for (&dim, adverbs) in by_dim {
        let mut next = Vec::with_capacity(options.len() * (adverbs.len() + 1));
        for opt in &options {
            next.push(opt.clone());
            for a in adverbs {
                next.push(opt.clone().with(dim, *a));
            }
        }
        options = next;
    }
    options
}

/// Borrowed view of the parameters the CPDs are computed from.
#[derive(Debug, Clone, Copy)]
pub struct MannerModel<'a> {
    pub grounding: &'a GroundingModel,
    pub rules: &'a RuleStore,
    pub leak: f64,
}

/// The net instantiated for one situation, ready for queries.
#[derive(Debug, Clone)]
pub struct CompiledNet {
    net: DiscreteNet,
    manner_vars: BTreeMap<String, usize>,
}

impl<'a> MannerModel<'a> {
    pub fn new(grounding: &'a GroundingModel, rules: &'a RuleStore) -> Self {
        MannerModel {
            grounding,
            rules,
            leak: DEFAULT_LEAK,
        }
    }

    pub fn compile(&self, structure: &NetStructure, situation: &Situation) -> Result<CompiledNet, InferenceError> {
        if !structure.is_current(self.rules, self.grounding) {
            return Err(InferenceError::UnsyncedStructure);
        }
        let mut net = DiscreteNet::new();
        let mut colour_vars = BTreeMap::new();
        for c in &structure.colour_nodes {
            let v = net.add_variable(format!("colour:{c}"), 2);
            let p = self.grounding.posterior(c, &situation.rgb);
            net.set_cpd(v, &[], vec![1.0 - p, p]).expect("binary prior");
            colour_vars.insert(c.as_str(), v);
        }

        let mut manner_vars = BTreeMap::new();
        for node in structure.manner_nodes.values() {
            let v = net.add_variable(format!("manner:{}", node.adverb), 2);
            let parents: Vec<&str> = node.colour_parents.iter().map(String::as_str).collect();
            let parent_vars: Vec<usize> = parents.iter().map(|c| colour_vars[c]).collect();
            let rules: Vec<_> = self
                .rules
                .iter()
                .filter(|b| b.rule.head == node.adverb)
                .filter(|b| b.rule.body.shape_atom().is_none_or(|s| *s == situation.shape))
                .collect();
            let mut table = Vec::with_capacity(2 << parents.len());
            for row in 0..(1usize << parents.len()) {
                // last parent varies fastest
                let on = |c: &str| {
                    let k = parents.iter().position(|p| *p == c).expect("colour parent");
                    (row >> (parents.len() - 1 - k)) & 1 == 1
                };
                let off: f64 = rules
                    .iter()
                    .filter(|b| b.rule.body.colour_atom().is_none_or(on))
                    .map(|b| 1.0 - b.belief())
                    .product();
                let p_on = 1.0 - (1.0 - self.leak) * off;
                table.extend([1.0 - p_on, p_on]);
            }
            net.set_cpd(v, &parent_vars, table).expect("noisy-or table");
            manner_vars.insert(node.adverb.clone(), v);
        }
        Ok(CompiledNet { net, manner_vars })
    }

    /// Probability that exactly the option's adverbs hold.
    pub fn option_probability(
        &self,
        structure: &NetStructure,
        situation: &Situation,
        option: &MannerOption,
    ) -> Result<f64, InferenceError> {
        Ok(self.compile(structure, situation)?.option_probability(option))
    }

    /// Most probable option; ties go to fewer adverbs, then to names.
    pub fn select_option(
        &self,
        structure: &NetStructure,
        situation: &Situation,
    ) -> Result<(MannerOption, f64), InferenceError> {
        let compiled = self.compile(structure, situation)?;
        let mut best: Option<(MannerOption, f64)> = None;
        for option in structure.options() {
            let p = compiled.option_probability(&option);
            let better = match &best {
                None => true,
                Some((b, bp)) => p > *bp || (p == *bp && option.order_key() < b.order_key()),
            };
            if better {
                best = Some((option, p));
            }
        }
        Ok(best.expect("the empty option always exists"))
    }
}

impl CompiledNet {
    pub fn net(&self) -> &DiscreteNet {
        &self.net
    }

    pub fn manner_adverbs(&self) -> impl Iterator<Item = &str> {
        self.manner_vars.keys().map(String::as_str)
    }

    /// Probability of a complete truth assignment to the manner nodes.
    pub fn assignment_probability(&self, truth: &BTreeMap<String, bool>) -> f64 {
        let evidence: BTreeMap<usize, usize> = self
            .manner_vars
            .iter()
            .map(|(a, &v)| (v, usize::from(truth.get(a).copied().unwrap_or(false))))
            .collect();
        self.net.probability_of(&evidence).expect("compiled net is complete")
    }

    pub fn option_probability(&self, option: &MannerOption) -> f64 {
        if option.chosen.values().any(|a| !self.manner_vars.contains_key(a)) {
            return 0.0;
        }
        let truth = self
            .manner_vars
            .keys()
            .map(|a| (a.clone(), option.contains(a)))
            .collect();
        self.assignment_probability(&truth)
    }
}

/// Realises an option: chosen adverbs sample their own dimension, the rest
/// are uniform. Dimensions are visited in a fixed order.
pub fn select_point<R: Rng + ?Sized>(
    option: &MannerOption,
    behaviour: &BehaviourModels,
    rng: &mut R,
) -> Result<BehaviourPoint, BehaviourError> {
    let mut coords = [0.0; 3];
    for (slot, dim) in coords.iter_mut().zip(Dimension::ALL) {
        *slot = match option.adverb_on(dim) {
            Some(adverb) => behaviour.sample(adverb, rng)?,
            None => rng.random::<f64>(),
        };
    }
    Ok(BehaviourPoint::new(coords[0], coords[1], coords[2]).expect("coordinates clipped to [0, 1]"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub id: String,
    pub kind: String,
    pub observed: bool,
    pub summary: String,
}

/// Node/edge listing for dashboards.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetSnapshot {
    pub nodes: Vec<NodeInfo>,
    pub edges: Vec<(String, String)>,
}

impl NetSnapshot {
    pub fn describe(structure: &NetStructure, rules: &RuleStore, grounding: &GroundingModel, leak: f64) -> Self {
        let mut nodes = vec![
            NodeInfo {
                id: "F(s)".into(),
                kind: "features".into(),
                observed: true,
                summary: "observed RGB".into(),
            },
            NodeInfo {
                id: "S".into(),
                kind: "shape".into(),
                observed: true,
                summary: "observed shape".into(),
            },
        ];
        for c in &structure.colour_nodes {
            nodes.push(NodeInfo {
                id: format!("colour:{c}"),
                kind: "colour".into(),
                observed: false,
                summary: format!("wKDE over {} exemplars", grounding.exemplars(c).len()),
            });
        }
        for node in structure.manner_nodes.values() {
            let parts: Vec<String> = rules
                .iter()
                .filter(|b| b.rule.head == node.adverb)
                .map(|b| format!("{}: {:.3}", b.rule.body, b.belief()))
                .collect();
            nodes.push(NodeInfo {
                id: format!("manner:{}", node.adverb),
                kind: "manner".into(),
                observed: false,
                summary: format!("noisy-or (leak {leak}) over [{}]", parts.join(", ")),
            });
        }
        for dim in Dimension::ALL {
            nodes.push(NodeInfo {
                id: format!("behaviour:{dim}"),
                kind: "behaviour".into(),
                observed: false,
                summary: "Gaussian per active adverb, uniform otherwise".into(),
            });
        }
        NetSnapshot {
            nodes,
            edges: structure.edges(),
        }
    }
}
