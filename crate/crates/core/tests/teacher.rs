mod common;

use manner_core::domain::{parse_utterance, render_utterance, Utterance};
use manner_core::world::{Policy, WorldConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn presets() -> [WorldConfig; 2] {
    [WorldConfig::fully_expressed(), WorldConfig::partial()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn feedback_is_truthful(seed in any::<u64>(), which in 0usize..2) {
        let cfg = &presets()[which];
        let gt = cfg.ground_truth().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gt.generate_situation(cfg.constrained_fraction, &mut rng);
        let p = common::random_point(seed);
        let violated = gt.violations(&s, &p);
        let u = gt.give_feedback(&s, &p);
        prop_assert_eq!(u.is_assent(), violated.is_empty());
        for a in u.adverbs() {
            let def = gt.adverb(a).unwrap();
            prop_assert!(!def.contains(p.get(def.dimension)));
        }
        if let Utterance::FullCorrection { body, adverbs } = &u {
            prop_assert!(gt.body_holds(body, &s));
            for a in adverbs {
                let stated = manner_core::Rule::new(body.clone(), a.clone());
                prop_assert!(gt.rules().contains(&(stated, Policy::Full)));
            }
        }
        let lexicon = cfg.agent_config().lexicon;
        let parsed = parse_utterance(&render_utterance(&u), &lexicon).unwrap();
        prop_assert_eq!(parsed.utterance, u);
    }

    #[test]
    fn obeying_every_rule_earns_assent(seed in any::<u64>(), which in 0usize..2) {
        let cfg = &presets()[which];
        let gt = cfg.ground_truth().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gt.generate_situation(cfg.constrained_fraction, &mut rng);
        let mut coords = [0.5; 3];
        for (rule, _) in gt.rules() {
            if gt.body_holds(&rule.body, &s) {
                let def = gt.adverb(&rule.head).unwrap();
                let slot = manner_core::Dimension::ALL.iter().position(|d| *d == def.dimension).unwrap();
                coords[slot] = (def.interval[0] + def.interval[1]) / 2.0;
            }
        }
        let p = manner_core::BehaviourPoint::new(coords[0], coords[1], coords[2]).unwrap();
        prop_assert_eq!(gt.give_feedback(&s, &p), Utterance::Assent);
    }
}

#[test]
fn configs_survive_toml_round_trip() {
    for cfg in presets() {
        let text = cfg.to_toml_string();
        assert_eq!(WorldConfig::from_toml_str(&text).unwrap(), cfg);
    }
}

#[test]
fn shipped_config_files_load() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config");
    assert_eq!(
        WorldConfig::load(root.join("fully_expressed.toml")).unwrap(),
        WorldConfig::fully_expressed()
    );
    assert_eq!(
        WorldConfig::load(root.join("partial.toml")).unwrap(),
        WorldConfig::partial()
    );
}

#[test]
fn constrained_fraction_is_honoured() {
    let cfg = WorldConfig::fully_expressed();
    let gt = cfg.ground_truth().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 4000;
    let hits = (0..n)
        .map(|_| gt.generate_situation(cfg.constrained_fraction, &mut rng))
        .filter(|s| gt.rules().iter().any(|(r, _)| gt.body_holds(&r.body, s)))
        .count();
    let rate = hits as f64 / f64::from(n);
    assert!(rate >= cfg.constrained_fraction - 0.03, "rate {rate}");
}
