//! Surface grammar for teacher feedback.
//!
//! ```text
//! yes
//! no, do it <adv> [and <adv>]*
//! no, when you see <colour> <shape>s do it <adv> [and <adv>]*
//! no, when you see <shape>s do it <adv> [and <adv>]*
//! no, when you see <colour> things do it <adv> [and <adv>]*
//! ```
//!
//! Matching is case-insensitive; the comma after `no` and a trailing `.` or
//! `!` are optional. An unseen colour word is accepted and reported in
//! [`Parsed::new_colours`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Dimension, RuleBody, Shape, Utterance};

const COLOUR_ONLY_NOUN: &str = "things";
const RESERVED: &[&str] = &["yes", "no", "when", "you", "see", "do", "it", "and", COLOUR_ONLY_NOUN];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("malformed utterance: {0}")]
    MalformedUtterance(String),
    #[error("adverbs '{0}' and '{1}' both constrain the {2} dimension")]
    DimensionConflict(String, String, Dimension),
    #[error("adverb '{0}' has no declared behaviour dimension")]
    UnknownAdverb(String),
}

impl GrammarError {
    /// Stable identifier used on the wire.
    pub fn code(&self) -> &'static str {
        match self {
            GrammarError::MalformedUtterance(_) => "MalformedUtterance",
            GrammarError::DimensionConflict(..) => "DimensionConflict",
            GrammarError::UnknownAdverb(_) => "UnknownAdverb",
        }
    }
}

/// Words the learner can currently parse.
///
/// Shapes and adverb dimensions are fixed up front; colour words grow as the
/// teacher introduces them. `introduced` tracks which declared adverbs have
/// actually been heard.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    shapes: BTreeSet<Shape>,
    colours: BTreeSet<String>,
    adverbs: BTreeMap<String, Dimension>,
    introduced: BTreeSet<String>,
}

/// Result of a successful parse.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub utterance: Utterance,
    pub new_colours: Vec<String>,
    pub new_adverbs: Vec<String>,
}

impl Lexicon {
    pub fn new(
        shapes: impl IntoIterator<Item = Shape>,
        adverbs: impl IntoIterator<Item = (String, Dimension)>,
    ) -> Self {
        Lexicon {
            shapes: shapes.into_iter().collect(),
            colours: BTreeSet::new(),
            adverbs: adverbs.into_iter().map(|(a, d)| (a.to_lowercase(), d)).collect(),
            introduced: BTreeSet::new(),
        }
    }

    pub fn with_colours(mut self, colours: impl IntoIterator<Item = String>) -> Self {
        self.colours.extend(colours.into_iter().map(|c| c.to_lowercase()));
        self
    }

    pub fn shapes(&self) -> impl Iterator<Item = &Shape> {
        self.shapes.iter()
    }

    pub fn colours(&self) -> impl Iterator<Item = &str> {
        self.colours.iter().map(String::as_str)
    }

    pub fn declared_adverbs(&self) -> impl Iterator<Item = (&str, Dimension)> {
        self.adverbs.iter().map(|(a, d)| (a.as_str(), *d))
    }

    pub fn introduced_adverbs(&self) -> impl Iterator<Item = &str> {
        self.introduced.iter().map(String::as_str)
    }

    pub fn knows_shape(&self, shape: &Shape) -> bool {
        self.shapes.contains(shape)
    }

    pub fn knows_colour(&self, colour: &str) -> bool {
        self.colours.contains(colour)
    }

    pub fn dimension_of(&self, adverb: &str) -> Option<Dimension> {
        self.adverbs.get(adverb).copied()
    }

    /// Records the symbols a parse introduced.
    pub fn absorb(&mut self, parsed: &Parsed) {
        self.colours.extend(parsed.new_colours.iter().cloned());
        self.introduced.extend(parsed.new_adverbs.iter().cloned());
    }

    pub fn add_colour(&mut self, colour: &str) {
        self.colours.insert(colour.to_lowercase());
    }

    pub fn mark_introduced(&mut self, adverb: &str) {
        if self.adverbs.contains_key(adverb) {
            self.introduced.insert(adverb.to_string());
        }
    }

    /// A word may name a colour unless it collides with grammar keywords,
    /// shapes or adverbs.
    pub fn is_valid_colour_word(&self, word: &str) -> bool {
        !word.is_empty()
            && word.chars().all(|c| c.is_ascii_lowercase() || c == '-')
            && !RESERVED.contains(&word)
            && !self.adverbs.contains_key(word)
            && !self
                .shapes
                .iter()
                .any(|s| s.as_str() == word || plural(s.as_str()) == word)
    }

    fn shape_from_plural(&self, word: &str) -> Option<Shape> {
        self.shapes.iter().find(|s| plural(s.as_str()) == word).cloned()
    }
}

/// English plural used for shape nouns.
pub fn plural(noun: &str) -> String {
    let ends_sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|e| noun.ends_with(e));
    if ends_sibilant {
        return format!("{noun}es");
    }
    let mut chars = noun.chars().rev();
    if let (Some('y'), Some(prev)) = (chars.next(), chars.next()) {
        if !"aeiou".contains(prev) {
            return format!("{}ies", &noun[..noun.len() - 1]);
        }
    }
    format!("{noun}s")
}

pub fn render_utterance(utterance: &Utterance) -> String {
    match utterance {
        Utterance::Assent => "yes".to_string(),
        Utterance::PartialCorrection { adverbs } => format!("no, do it {}", adverbs.join(" and ")),
        Utterance::FullCorrection { body, adverbs } => {
            let context = match (body.colour_atom(), body.shape_atom()) {
                (Some(c), Some(s)) => format!("{c} {}", plural(s.as_str())),
                (Some(c), None) => format!("{c} {COLOUR_ONLY_NOUN}"),
                (None, Some(s)) => plural(s.as_str()),
                (None, None) => unreachable!("rule bodies always carry an atom"),
            };
            format!("no, when you see {context} do it {}", adverbs.join(" and "))
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.trim().to_lowercase();
    let trimmed = lowered.trim_end_matches(['.', '!']);
    trimmed
        .replace(',', " ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn malformed(msg: impl Into<String>) -> GrammarError {
    GrammarError::MalformedUtterance(msg.into())
}

fn expect(tokens: &[String], pos: usize, word: &str) -> Result<(), GrammarError> {
    match tokens.get(pos) {
        Some(t) if t == word => Ok(()),
        Some(t) => Err(malformed(format!("expected '{word}' but found '{t}'"))),
        None => Err(malformed(format!("expected '{word}' but the utterance ended"))),
    }
}

fn parse_adverbs(tokens: &[String], lexicon: &Lexicon) -> Result<Vec<String>, GrammarError> {
    if tokens.is_empty() {
        return Err(malformed("expected at least one adverb after 'do it'"));
    }
    let mut adverbs = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i % 2 == 1 {
            if tok != "and" {
                return Err(malformed(format!("expected 'and' between adverbs, found '{tok}'")));
            }
            continue;
        }
        if tok == "and" {
            return Err(malformed("dangling 'and' in adverb list"));
        }
        if lexicon.dimension_of(tok).is_none() {
            return Err(GrammarError::UnknownAdverb(tok.clone()));
        }
        adverbs.push(tok.clone());
    }
    if tokens.len().is_multiple_of(2) {
        return Err(malformed("dangling 'and' in adverb list"));
    }
    check_dimensions(&adverbs, lexicon)?;
    Ok(adverbs)
}

fn check_dimensions(adverbs: &[String], lexicon: &Lexicon) -> Result<(), GrammarError> {
    let mut seen: BTreeMap<Dimension, &str> = BTreeMap::new();
    for a in adverbs {
        let Some(dim) = lexicon.dimension_of(a) else {
            return Err(GrammarError::UnknownAdverb(a.clone()));
        };
        if let Some(prev) = seen.insert(dim, a) {
            return Err(GrammarError::DimensionConflict(prev.to_string(), a.clone(), dim));
        }
    }
    Ok(())
}

fn parse_context(tokens: &[String], lexicon: &Lexicon) -> Result<RuleBody, GrammarError> {
    match tokens {
        [noun] => lexicon
            .shape_from_plural(noun)
            .map(RuleBody::shape)
            .ok_or_else(|| malformed(format!("'{noun}' is not a known plural shape noun"))),
        [colour, noun] => {
            if !lexicon.is_valid_colour_word(colour) {
                return Err(malformed(format!("'{colour}' cannot be used as a colour word")));
            }
            if noun == COLOUR_ONLY_NOUN {
                Ok(RuleBody::colour(colour.clone()))
            } else {
                lexicon
                    .shape_from_plural(noun)
                    .map(|s| RuleBody::colour_and_shape(colour.clone(), s))
                    .ok_or_else(|| malformed(format!("'{noun}' is not a known plural shape noun")))
            }
        }
        [] => Err(malformed("missing context after 'when you see'")),
        _ => Err(malformed(
            "context must be '<colour> <shape>s', '<shape>s' or '<colour> things'",
        )),
    }
}

/// Parses a teacher utterance against the learner's current lexicon.
pub fn parse_utterance(text: &str, lexicon: &Lexicon) -> Result<Parsed, GrammarError> {
    let tokens = tokenize(text);
    let utterance = match tokens.first().map(String::as_str) {
        Some("yes") if tokens.len() == 1 => Utterance::Assent,
        Some("yes") => return Err(malformed("nothing may follow 'yes'")),
        Some("no") => match tokens.get(1).map(String::as_str) {
            Some("do") => {
                expect(&tokens, 2, "it")?;
                Utterance::PartialCorrection {
                    adverbs: parse_adverbs(&tokens[3..], lexicon)?,
                }
            }
            Some("when") => {
                expect(&tokens, 2, "you")?;
                expect(&tokens, 3, "see")?;
                let do_at = tokens
                    .iter()
                    .skip(4)
                    .position(|t| t == "do")
                    .map(|i| i + 4)
                    .ok_or_else(|| malformed("expected 'do it' after the context"))?;
                expect(&tokens, do_at + 1, "it")?;
                let body = parse_context(&tokens[4..do_at], lexicon)?;
                Utterance::FullCorrection {
                    body,
                    adverbs: parse_adverbs(&tokens[do_at + 2..], lexicon)?,
                }
            }
            Some(t) => {
                return Err(malformed(format!(
                    "expected 'do it' or 'when you see' after 'no', found '{t}'"
                )))
            }
            None => return Err(malformed("a bare 'no' is not one of the accepted forms")),
        },
        Some(t) => {
            return Err(malformed(format!(
                "utterance must start with 'yes' or 'no', found '{t}'"
            )))
        }
        None => return Err(malformed("empty utterance")),
    };

    let new_colours = match &utterance {
        Utterance::FullCorrection { body, .. } => body
            .colour_atom()
            .filter(|c| !lexicon.knows_colour(c))
            .map(|c| vec![c.to_string()])
            .unwrap_or_default(),
        _ => Vec::new(),
    };
    let new_adverbs = utterance
        .adverbs()
        .iter()
        .filter(|a| !lexicon.introduced.contains(*a))
        .cloned()
        .collect();
    Ok(Parsed {
        utterance,
        new_colours,
        new_adverbs,
    })
}
