mod common;

use std::collections::BTreeMap;

use manner_core::acceptance::oracle::RandomNet;
use manner_core::agents::{AgentConfig, Learner, LearnerKind};
use manner_core::inference::{MannerModel, MannerOption};
use manner_core::world::WorldConfig;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Joint over the manner nodes by summing the colour nodes out by hand.
fn noisy_or_joint(learner: &Learner, s: &manner_core::Situation, truth: &BTreeMap<String, bool>) -> f64 {
    let colours = learner.structure().colour_nodes().to_vec();
    let priors: Vec<f64> = colours
        .iter()
        .map(|c| learner.grounding().posterior(c, &s.rgb))
        .collect();
    let mut total = 0.0;
    for mask in 0..(1usize << colours.len()) {
        let on = |c: &str| {
            let k = colours.iter().position(|x| x == c).unwrap();
            mask >> k & 1 == 1
        };
        let mut p: f64 = priors
            .iter()
            .enumerate()
            .map(|(k, &q)| if mask >> k & 1 == 1 { q } else { 1.0 - q })
            .product();
        for node in learner.structure().manner_nodes() {
            let off: f64 = learner
                .rules()
                .iter()
                .filter(|b| b.rule.head == node.adverb)
                .filter(|b| b.rule.body.shape_atom().is_none_or(|x| *x == s.shape))
                .filter(|b| b.rule.body.colour_atom().is_none_or(on))
                .map(|b| 1.0 - b.belief())
                .product();
            let p_on = 1.0 - 0.95 * off;
            p *= if truth[&node.adverb] { p_on } else { 1.0 - p_on };
        }
        total += p;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let def = RandomNet::random(8, &mut rng);
        let net = def.build();
        for _ in 0..4 {
            let ev = def.random_evidence(&mut rng);
            let got = net.probability_of(&ev).unwrap();
            prop_assert!((got - def.brute_force(&ev)).abs() <= 1e-9);
        }
    }

    #[test]
    fn conditionals_are_normalised(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let def = RandomNet::random(6, &mut rng);
        let net = def.build();
        let ev = def.random_evidence(&mut rng);
        let query = (0..def.cards.len()).find(|v| !ev.contains_key(v));
        if let Some(q) = query {
            let total: f64 = (0..def.cards[q])
                .map(|x| net.conditional(&BTreeMap::from([(q, x)]), &ev).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn learnt_manner_net_matches_hand_noisy_or(seed in 0u64..1000, steps in 1usize..40) {
        let cfg = WorldConfig::fully_expressed();
        let mut learner = Learner::new(LearnerKind::Full, &cfg.agent_config());
        let trace = common::drive(&mut learner, &cfg, seed, steps);
        learner.sync();
        let model = MannerModel::new(learner.grounding(), learner.rules());
        for step in trace.iter().rev().take(3) {
            let s = &step.situation;
            let compiled = model.compile(learner.structure(), s).unwrap();
            let adverbs: Vec<String> = compiled.manner_adverbs().map(str::to_string).collect();
            let mut sum = 0.0;
            for mask in 0..(1usize << adverbs.len()) {
                let truth: BTreeMap<String, bool> =
                    adverbs.iter().enumerate().map(|(k, a)| (a.clone(), mask >> k & 1 == 1)).collect();
                let got = compiled.assignment_probability(&truth);
                prop_assert!((got - noisy_or_joint(&learner, s, &truth)).abs() < 1e-9);
                sum += got;
            }
            prop_assert!((sum - 1.0).abs() < 1e-9);
            let (best, p) = model.select_option(learner.structure(), s).unwrap();
            for option in learner.structure().options() {
                prop_assert!(compiled.option_probability(&option) <= p);
            }
            prop_assert!(learner.structure().options().contains(&best));
        }
    }
}

#[test]
fn option_outside_structure_has_zero_mass() {
    let learner = Learner::new(LearnerKind::Full, &AgentConfig::default());
    let model = MannerModel::new(learner.grounding(), learner.rules());
    let s = common::drive_free_situation();
    let compiled = model.compile(learner.structure(), &s).unwrap();
    let option = MannerOption::empty().with(manner_core::Dimension::Speed, "quickly");
    assert_eq!(compiled.option_probability(&option), 0.0);
    assert!((compiled.option_probability(&MannerOption::empty()) - 1.0).abs() < 1e-12);
}
