//! Independent reference computations used to check the main code paths.

use std::collections::BTreeMap;

use rand::Rng;

use crate::domain::{BehaviourPoint, Dimension, Lexicon, RuleBody, Shape, Utterance};
use crate::inference::factor::DiscreteNet;

/// A generated net together with the raw tables it was built from.
#[derive(Debug, Clone)]
pub struct RandomNet {
    pub cards: Vec<usize>,
    pub parents: Vec<Vec<usize>>,
    /// Rows over parent assignments, last parent fastest.
    pub tables: Vec<Vec<f64>>,
}

impl RandomNet {
    /// Random DAG over `2..=max_nodes` variables of cardinality 2 or 3, at
    /// most three parents each, with strictly positive rows.
    pub fn random<R: Rng + ?Sized>(max_nodes: usize, rng: &mut R) -> Self {
        let n = rng.random_range(2..=max_nodes);
        let mut cards = Vec::with_capacity(n);
        let mut parents = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for v in 0..n {
            let card = rng.random_range(2..=3);
            let mut ps: Vec<usize> = (0..v).filter(|_| rng.random_bool(0.4)).collect();
            ps.truncate(3);
            let rows: usize = ps.iter().map(|&p| cards[p]).product();
            let mut table = Vec::with_capacity(rows * card);
            for _ in 0..rows {
                let raw: Vec<f64> = (0..card).map(|_| rng.random_range(0.01..1.0)).collect();
                let z: f64 = raw.iter().sum();
                table.extend(raw.iter().map(|x| x / z));
            }
            cards.push(card);
            parents.push(ps);
            tables.push(table);
        }
        RandomNet { cards, parents, tables }
    }

    pub fn build(&self) -> DiscreteNet {
        let mut net = DiscreteNet::new();
        for (v, &c) in self.cards.iter().enumerate() {
            net.add_variable(format!("x{v}"), c);
        }
        for v in 0..self.cards.len() {
            net.set_cpd(v, &self.parents[v], self.tables[v].clone())
                .expect("generated tables are well formed");
        }
        net
    }

    fn entry(&self, v: usize, assignment: &[usize]) -> f64 {
        let mut row = 0;
        for &p in &self.parents[v] {
            row = row * self.cards[p] + assignment[p];
        }
        self.tables[v][row * self.cards[v] + assignment[v]]
    }

    /// Sum of the joint over every full assignment consistent with
    /// `evidence`.
    pub fn brute_force(&self, evidence: &BTreeMap<usize, usize>) -> f64 {
        let n = self.cards.len();
        let mut assignment = vec![0usize; n];
        let mut total = 0.0;
        loop {
            if evidence.iter().all(|(&v, &x)| assignment[v] == x) {
                total += (0..n).map(|v| self.entry(v, &assignment)).product::<f64>();
            }
            let mut i = 0;
            loop {
                if i == n {
                    return total;
                }
                assignment[i] += 1;
                if assignment[i] < self.cards[i] {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
        }
    }

    pub fn random_evidence<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<usize, usize> {
        let mut evidence = BTreeMap::new();
        for (v, &card) in self.cards.iter().enumerate() {
            if rng.random_bool(0.4) {
                evidence.insert(v, rng.random_range(0..card));
            }
        }
        evidence
    }
}

/// Isotropic 3-D Gaussian density at squared distance `d2`.
pub fn kernel(d2: f64, h: f64) -> f64 {
    (-d2 / (2.0 * h * h)).exp() / (2.0 * std::f64::consts::PI * h * h).powf(1.5)
}

const COLOUR_WORDS: [&str; 8] = ["red", "green", "blue", "maroon", "teal", "ochre", "violet", "amber"];

/// A random well-formed utterance over `lexicon`'s shapes and adverbs.
pub fn random_utterance<R: Rng + ?Sized>(lexicon: &Lexicon, rng: &mut R) -> Utterance {
    let shapes: Vec<&Shape> = lexicon.shapes().collect();
    let mut by_dim: BTreeMap<Dimension, Vec<&str>> = BTreeMap::new();
    for (a, d) in lexicon.declared_adverbs() {
        by_dim.entry(d).or_default().push(a);
    }
    let mut adverbs: Vec<String> = Vec::new();
    while adverbs.is_empty() {
        for words in by_dim.values() {
            if rng.random_bool(0.5) {
                adverbs.push(words[rng.random_range(0..words.len())].to_string());
            }
        }
    }
    match rng.random_range(0..5) {
        0 => Utterance::Assent,
        1 => Utterance::PartialCorrection { adverbs },
        k => {
            let colour = COLOUR_WORDS[rng.random_range(0..COLOUR_WORDS.len())].to_string();
            let shape = shapes[rng.random_range(0..shapes.len())].clone();
            let body = match k {
                2 => RuleBody::colour_and_shape(colour, shape),
                3 => RuleBody::shape(shape),
                _ => RuleBody::colour(colour),
            };
            Utterance::FullCorrection { body, adverbs }
        }
    }
}

pub fn uniform_point<R: Rng + ?Sized>(rng: &mut R) -> BehaviourPoint {
    BehaviourPoint::new(rng.random(), rng.random(), rng.random()).expect("unit draws")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn brute_force_total_mass_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let def = RandomNet::random(6, &mut rng);
            assert!((def.brute_force(&BTreeMap::new()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_peak() {
        let h: f64 = 25.0;
        assert!((kernel(0.0, h) - 1.0 / (2.0 * std::f64::consts::PI * 625.0).powf(1.5)).abs() < 1e-20);
    }
}
