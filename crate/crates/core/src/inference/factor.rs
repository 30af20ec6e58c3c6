//! Discrete factors and exact variable elimination.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactorError {
    #[error("factor table has {got} entries, scope requires {expected}")]
    BadTableSize { expected: usize, got: usize },
    #[error("variable {0} is not part of the network")]
    UnknownVariable(usize),
    #[error("value {value} out of range for variable {var} with cardinality {card}")]
    BadValue { var: usize, value: usize, card: usize },
    #[error("variable {0} already has a distribution")]
    DuplicateCpd(usize),
    #[error("variable {0} has no distribution")]
    MissingCpd(usize),
}

/// A table over a set of discrete variables; the last variable in `vars`
/// varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self, FactorError> {
        let expected: usize = cards.iter().product();
        if values.len() != expected || vars.len() != cards.len() {
            return Err(FactorError::BadTableSize {
                expected,
                got: values.len(),
            });
        }
        Ok(Factor { vars, cards, values })
    }

    pub fn scalar(value: f64) -> Self {
        Factor {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![value],
        }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cards[i + 1];
        }
        strides
    }

    /// Value under an assignment of (at least) this factor's variables.
    pub fn value_at(&self, assignment: &BTreeMap<usize, usize>) -> f64 {
        let strides = self.strides();
        let idx: usize = self
            .vars
            .iter()
            .zip(strides.iter())
            .map(|(v, s)| assignment[v] * s)
            .sum();
        self.values[idx]
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        for (v, c) in other.vars.iter().zip(other.cards.iter()) {
            if !vars.contains(v) {
                vars.push(*v);
                cards.push(*c);
            }
        }
        let size: usize = cards.iter().product();
        let (sa, sb) = (self.strides(), other.strides());
        let pos_a: Vec<Option<usize>> = vars.iter().map(|v| self.vars.iter().position(|x| x == v)).collect();
        let pos_b: Vec<Option<usize>> = vars.iter().map(|v| other.vars.iter().position(|x| x == v)).collect();
        let mut values = Vec::with_capacity(size);
        let mut digits = vec![0usize; vars.len()];
        for _ in 0..size {
            let mut ia = 0;
            let mut ib = 0;
            for (k, &d) in digits.iter().enumerate() {
                if let Some(p) = pos_a[k] {
                    ia += d * sa[p];
                }
                if let Some(p) = pos_b[k] {
                    ib += d * sb[p];
                }
            }
            values.push(self.values[ia] * other.values[ib]);
            increment(&mut digits, &cards);
        }
        Factor { vars, cards, values }
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(k) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(k);
        let card_k = cards.remove(k);
        let strides = self.strides();
        let size: usize = cards.iter().product();
        let mut values = vec![0.0; size];
        let mut digits = vec![0usize; vars.len()];
        for out in values.iter_mut() {
            let mut base = 0;
            for (j, &d) in digits.iter().enumerate() {
                let src = if j < k { j } else { j + 1 };
                base += d * strides[src];
            }
            *out = (0..card_k).map(|x| self.values[base + x * strides[k]]).sum();
            increment(&mut digits, &cards);
        }
        Factor { vars, cards, values }
    }

    /// Restricts `var` to `value`, dropping it from the scope.
    pub fn reduce(&self, var: usize, value: usize) -> Factor {
        let Some(k) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(k);
        cards.remove(k);
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut digits = vec![0usize; vars.len()];
        for _ in 0..size {
            let mut idx = value * strides[k];
            for (j, &d) in digits.iter().enumerate() {
                let src = if j < k { j } else { j + 1 };
                idx += d * strides[src];
            }
            values.push(self.values[idx]);
            increment(&mut digits, &cards);
        }
        Factor { vars, cards, values }
    }
}

fn increment(digits: &mut [usize], cards: &[usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < cards[i] {
            return;
        }
        digits[i] = 0;
    }
}

/// A Bayes net over discrete variables; each CPD is a factor over the
/// variable's parents followed by the variable itself.
#[derive(Debug, Clone, Default)]
pub struct DiscreteNet {
    names: Vec<String>,
    cards: Vec<usize>,
    parents: Vec<Vec<usize>>,
    cpds: Vec<Option<Factor>>,
}

impl DiscreteNet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, card: usize) -> usize {
        self.names.push(name.into());
        self.cards.push(card);
        self.parents.push(Vec::new());
        self.cpds.push(None);
        self.names.len() - 1
    }

    /// `table` rows follow parent assignments in order (last parent fastest);
    /// each row lists `P(var = k | parents)` for every value `k`.
    pub fn set_cpd(&mut self, var: usize, parents: &[usize], table: Vec<f64>) -> Result<(), FactorError> {
        for &v in parents.iter().chain(std::iter::once(&var)) {
            if v >= self.cards.len() {
                return Err(FactorError::UnknownVariable(v));
            }
        }
        if self.cpds[var].is_some() {
            return Err(FactorError::DuplicateCpd(var));
        }
        let mut vars = parents.to_vec();
        vars.push(var);
        let cards = vars.iter().map(|&v| self.cards[v]).collect();
        self.cpds[var] = Some(Factor::new(vars, cards, table)?);
        self.parents[var] = parents.to_vec();
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn card(&self, var: usize) -> usize {
        self.cards[var]
    }

    pub fn parents(&self, var: usize) -> &[usize] {
        &self.parents[var]
    }

    pub fn cpd(&self, var: usize) -> Option<&Factor> {
        self.cpds[var].as_ref()
    }

    fn check_evidence(&self, evidence: &BTreeMap<usize, usize>) -> Result<(), FactorError> {
        for (&var, &value) in evidence {
            if var >= self.cards.len() {
                return Err(FactorError::UnknownVariable(var));
            }
            if value >= self.cards[var] {
                return Err(FactorError::BadValue {
                    var,
                    value,
                    card: self.cards[var],
                });
            }
        }
        if let Some(missing) = self.cpds.iter().position(Option::is_none) {
            return Err(FactorError::MissingCpd(missing));
        }
        Ok(())
    }

    /// `P(evidence)` by variable elimination with a greedy min-neighbour order.
    pub fn probability_of(&self, evidence: &BTreeMap<usize, usize>) -> Result<f64, FactorError> {
        self.check_evidence(evidence)?;
        let mut factors: Vec<Factor> = self
            .cpds
            .iter()
            .flatten()
            .map(|f| {
                evidence
                    .iter()
                    .fold(f.clone(), |acc, (&var, &val)| acc.reduce(var, val))
            })
            .collect();

        let mut remaining: BTreeSet<usize> = (0..self.len()).filter(|v| !evidence.contains_key(v)).collect();
        while !remaining.is_empty() {
            let next = *remaining
                .iter()
                .min_by_key(|&&v| {
                    let mut neighbours = BTreeSet::new();
                    for f in factors.iter().filter(|f| f.vars.contains(&v)) {
                        neighbours.extend(f.vars.iter().copied());
                    }
                    (neighbours.len(), v)
                })
                .expect("non-empty");
            remaining.remove(&next);
            let (touching, rest): (Vec<Factor>, Vec<Factor>) =
                factors.into_iter().partition(|f| f.vars.contains(&next));
            factors = rest;
            if let Some(joined) = touching.into_iter().reduce(|a, b| a.product(&b)) {
                factors.push(joined.sum_out(next));
            }
        }
        Ok(factors.iter().fold(1.0, |acc, f| acc * f.values.iter().sum::<f64>()))
    }

    /// `P(query | evidence)`; the query must not contradict the evidence.
    pub fn conditional(
        &self,
        query: &BTreeMap<usize, usize>,
        evidence: &BTreeMap<usize, usize>,
    ) -> Result<f64, FactorError> {
        let denom = self.probability_of(evidence)?;
        let mut joint = evidence.clone();
        for (&k, &v) in query {
            if let Some(&e) = evidence.get(&k) {
                if e != v {
                    return Ok(0.0);
                }
            }
            joint.insert(k, v);
        }
        let num = self.probability_of(&joint)?;
        Ok(if denom > 0.0 { num / denom } else { 0.0 })
    }
}
