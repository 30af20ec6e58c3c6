use manner_core::acceptance::oracle::random_utterance;
use manner_core::domain::{parse_utterance, render_utterance, Lexicon};
use manner_core::{Dimension, Shape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lexicon() -> Lexicon {
    Lexicon::new(
        ["square", "circle", "triangle", "box"].map(Shape::new),
        [
            ("gently".to_string(), Dimension::Energy),
            ("firmly".to_string(), Dimension::Energy),
            ("slowly".to_string(), Dimension::Speed),
            ("quickly".to_string(), Dimension::Speed),
            ("leftwards".to_string(), Dimension::Direction),
        ],
    )
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        let lex = lexicon();
        let u = random_utterance(&lex, &mut ChaCha8Rng::seed_from_u64(seed));
        let text = render_utterance(&u);
        let parsed = parse_utterance(&text, &lex).unwrap();
        prop_assert_eq!(&parsed.utterance, &u);
        prop_assert_eq!(render_utterance(&parsed.utterance), text);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[a-z ,]{0,60}") {
        let _ = parse_utterance(&text, &lexicon());
    }
}

#[test]
fn irregular_plural_round_trips() {
    let lex = lexicon();
    let parsed = parse_utterance("no, when you see red boxes do it gently", &lex).unwrap();
    assert_eq!(
        render_utterance(&parsed.utterance),
        "no, when you see red boxes do it gently"
    );
}

#[test]
fn error_codes() {
    let lex = lexicon();
    let code = |t: &str| parse_utterance(t, &lex).unwrap_err().code();
    assert_eq!(code("maybe"), "MalformedUtterance");
    assert_eq!(code("no, do it"), "MalformedUtterance");
    assert_eq!(code("no, do it slowly and quickly"), "DimensionConflict");
    assert_eq!(code("no, do it sideways"), "UnknownAdverb");
}

#[test]
fn new_colour_words_are_reported() {
    let lex = lexicon().with_colours(["red".to_string()]);
    let parsed = parse_utterance("no, when you see teal circles do it firmly", &lex).unwrap();
    assert_eq!(parsed.new_colours, vec!["teal".to_string()]);
    let parsed = parse_utterance("no, when you see red circles do it firmly", &lex).unwrap();
    assert!(parsed.new_colours.is_empty());
}
