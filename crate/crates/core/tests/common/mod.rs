#![allow(dead_code)]

use manner_core::acceptance::oracle::uniform_point;
use manner_core::domain::{parse_utterance, render_utterance, BehaviourPoint, Situation, Utterance};
use manner_core::world::{GroundTruth, WorldConfig};
use manner_core::{Action, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Step {
    pub situation: Situation,
    pub action: Action,
    pub utterance: Utterance,
}

/// Drives `agent` against the config's teacher for `steps` situations,
/// with the same stream layout as the experiment runner.
pub fn drive(agent: &mut dyn Strategy, config: &WorldConfig, seed: u64, steps: usize) -> Vec<Step> {
    let gt = config.ground_truth().unwrap();
    let mut world = ChaCha8Rng::seed_from_u64(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..steps)
        .map(|_| {
            let situation = gt.generate_situation(config.constrained_fraction, &mut world);
            let action = agent.act(&situation, &mut rng).unwrap();
            let utterance = teacher(&gt, &situation, &action.point, agent);
            agent
                .ingest(&situation, &action.point, &utterance, action.option.as_ref())
                .unwrap();
            Step {
                situation,
                action,
                utterance,
            }
        })
        .collect()
}

pub fn teacher(gt: &GroundTruth, s: &Situation, p: &BehaviourPoint, agent: &dyn Strategy) -> Utterance {
    let text = render_utterance(&gt.give_feedback(s, p));
    parse_utterance(&text, agent.lexicon()).unwrap().utterance
}

pub fn random_point(seed: u64) -> BehaviourPoint {
    uniform_point(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn drive_free_situation() -> Situation {
    Situation::new(manner_core::Shape::new("square"), manner_core::Rgb::new(10, 200, 10))
}
