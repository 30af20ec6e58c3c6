mod common;

use manner_core::agents::{AgentConfig, JustNo, Learner, LearnerKind, RandomAgent};
use manner_core::domain::Utterance;
use manner_core::experiment::run_trial;
use manner_core::world::WorldConfig;
use manner_core::{Strategy, StrategyRegistry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lockstep(
    a: &mut dyn Strategy,
    b: &mut dyn Strategy,
    cfg: &WorldConfig,
    seed: u64,
    until: impl Fn(&Utterance) -> bool,
) -> usize {
    let gt = cfg.ground_truth().unwrap();
    let mut world = ChaCha8Rng::seed_from_u64(seed);
    let mut ra = ChaCha8Rng::seed_from_u64(seed);
    ra.set_stream(1);
    let mut rb = ra.clone();
    for step in 0..cfg.situations_per_trial {
        let s = gt.generate_situation(cfg.constrained_fraction, &mut world);
        let act_a = a.act(&s, &mut ra).unwrap();
        let act_b = b.act(&s, &mut rb).unwrap();
        assert_eq!(act_a, act_b, "seed {seed} diverged at step {step}");
        let u = common::teacher(&gt, &s, &act_a.point, a);
        a.ingest(&s, &act_a.point, &u, act_a.option.as_ref()).unwrap();
        b.ingest(&s, &act_b.point, &u, act_b.option.as_ref()).unwrap();
        if until(&u) {
            return step;
        }
    }
    cfg.situations_per_trial
}

#[test]
fn no_assent_matches_full_until_first_assent() {
    let cfg = WorldConfig::fully_expressed();
    for seed in 0..10 {
        let mut full = Learner::new(LearnerKind::Full, &cfg.agent_config());
        let mut ablated = Learner::new(LearnerKind::NoAssent, &cfg.agent_config());
        lockstep(&mut full, &mut ablated, &cfg, seed, Utterance::is_assent);
    }
}

#[test]
fn no_negative_matches_full_until_first_correction() {
    let cfg = WorldConfig::partial();
    for seed in 0..10 {
        let mut full = Learner::new(LearnerKind::Full, &cfg.agent_config());
        let mut ablated = Learner::new(LearnerKind::NoNegative, &cfg.agent_config());
        lockstep(&mut full, &mut ablated, &cfg, seed, |u| !u.is_assent());
    }
}

#[test]
fn just_no_ignores_correction_content() {
    let cfg = WorldConfig::fully_expressed();
    let gt = cfg.ground_truth().unwrap();
    let mut heard = JustNo::new(&cfg.agent_config());
    let mut blind = JustNo::new(&cfg.agent_config());
    let mut world = ChaCha8Rng::seed_from_u64(4);
    let mut ra = ChaCha8Rng::seed_from_u64(9);
    let mut rb = ra.clone();
    let bare = Utterance::PartialCorrection {
        adverbs: vec!["slowly".into()],
    };
    for _ in 0..100 {
        let s = gt.generate_situation(cfg.constrained_fraction, &mut world);
        let a = heard.act(&s, &mut ra).unwrap();
        assert_eq!(a, blind.act(&s, &mut rb).unwrap());
        let u = gt.give_feedback(&s, &a.point);
        let substitute = if u.is_assent() { Utterance::Assent } else { bare.clone() };
        heard.ingest(&s, &a.point, &u, None).unwrap();
        blind.ingest(&s, &a.point, &substitute, None).unwrap();
    }
    assert_eq!(heard, blind);
}

#[test]
fn learners_survive_a_state_round_trip_mid_trial() {
    let cfg = WorldConfig::fully_expressed();
    for name in ["full", "just-no", "random"] {
        let reg = StrategyRegistry::builtin();
        let mut agent = reg.create(name, &cfg.agent_config()).unwrap();
        common::drive(agent.as_mut(), &cfg, 2, 30);
        let json = serde_json::to_string(&agent.export_state()).unwrap();
        let restored = serde_json::from_str::<manner_core::agents::AgentState>(&json).unwrap();
        assert_eq!(restored, agent.export_state());
        assert_eq!(restored.into_strategy().snapshot(), agent.snapshot());
    }
}

#[test]
fn registered_strategies_run_through_the_trial_loop() {
    let mut reg = StrategyRegistry::empty();
    reg.register("coin", |c: &AgentConfig| Box::new(RandomAgent::new(c)));
    let t = run_trial(&reg, "coin", &WorldConfig::fully_expressed(), 0).unwrap();
    assert_eq!(t.steps.len(), 100);
    assert_eq!(t.strategy, "coin");
}

#[test]
fn full_learner_snapshot_reports_what_it_heard() {
    let cfg = WorldConfig::fully_expressed();
    let mut learner = Learner::new(LearnerKind::Full, &cfg.agent_config());
    let trace = common::drive(&mut learner, &cfg, 1, 40);
    let snap = learner.snapshot();
    assert_eq!(snap.strategy, "full");
    for step in &trace {
        if let Utterance::FullCorrection { body, adverbs } = &step.utterance {
            if let Some(c) = body.colour_atom() {
                assert!(snap.colours.iter().any(|v| v.name == c));
            }
            for a in adverbs {
                assert!(snap.adverbs.iter().any(|v| &v.name == a));
                let rule = format!("{}", manner_core::Rule::new(body.clone(), a.clone()));
                assert!(snap.rules.iter().any(|r| r.rule == rule && r.confirmed));
            }
        }
    }
}
