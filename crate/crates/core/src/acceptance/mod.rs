//! The acceptance criteria A1 to A8 as callable checks.
//!
//! Each check returns a [`CriterionReport`]; nothing here panics on a
//! failed criterion, so the same functions back both the `acceptance` test
//! target and the CLI's `check` subcommand.

pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agents::{AgentConfig, Learner, LearnerKind, Strategy};
use crate::behaviour::{AdverbModel, ModelParams};
use crate::domain::{
    parse_utterance, render_utterance, AdverbConcept, Dimension, Lexicon, Rgb, Rule, RuleBody, Shape, Situation,
    Utterance,
};
use crate::experiment::{run_experiment, ExperimentResult};
use crate::grounding::GroundingModel;
use crate::rules::RuleStore;
use crate::world::{Policy, WorldConfig};
use crate::StrategyRegistry;
use oracle::RandomNet;

pub const SEEDS: std::ops::Range<u64> = 0..10;
pub const STRATEGIES: [&str; 5] = ["full", "no-assent", "no-negative", "just-no", "random"];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{} {verdict} {}: {}", self.id, self.title, self.detail)
    }
}

/// Accumulates named sub-checks into one report.
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what.clone());
        }
        self.notes.push(what);
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{name}={got:.6e} (want {want:.6e})"));
    }

    fn report(self, id: &'static str, title: &'static str, summary: String) -> CriterionReport {
        let passed = self.failures.is_empty();
        let detail = if passed {
            summary
        } else {
            format!("{summary}; failed: {}", self.failures.join("; "))
        };
        CriterionReport {
            id,
            title,
            passed,
            detail,
        }
    }
}

fn seeds() -> Vec<u64> {
    SEEDS.collect()
}

fn means(result: &ExperimentResult) -> BTreeMap<String, f64> {
    result.summary().into_iter().map(|s| (s.strategy, s.mean)).collect()
}

/// A1: Full < NoAssent, Full < NoNegative, Full < JustNo < Random; Welch
/// p < 0.05 for Full against Random and JustNo; under 60 s.
pub fn a1_strategy_ordering(config: &WorldConfig) -> CriterionReport {
    let started = Instant::now();
    let result = run_experiment(&StrategyRegistry::builtin(), config, &STRATEGIES, &seeds());
    let elapsed = started.elapsed().as_secs_f64();
    let mut c = Checks::new();
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            c.check(false, e.to_string());
            return c.report("A1", "strategy ordering", String::new());
        }
    };
    let m = means(&result);
    c.check(m["full"] < m["no-assent"], "full < no-assent");
    c.check(m["full"] < m["no-negative"], "full < no-negative");
    c.check(m["full"] < m["just-no"], "full < just-no");
    c.check(m["just-no"] < m["random"], "just-no < random");
    let mut tests = Vec::new();
    for other in ["random", "just-no"] {
        match result.compare("full", other) {
            Ok(w) => {
                c.check(w.p < 0.05, format!("full vs {other} p={:.2e}", w.p));
                tests.push(format!("vs {other} t={:.2} p={:.2e}", w.t, w.p));
            }
            Err(e) => c.check(false, e.to_string()),
        }
    }
    c.check(elapsed < 60.0, format!("runtime {elapsed:.1}s"));
    let summary = format!(
        "mean terminal regret full={:.1} no-assent={:.1} no-negative={:.1} just-no={:.1} random={:.1}; {}; {elapsed:.1}s",
        m["full"],
        m["no-assent"],
        m["no-negative"],
        m["just-no"],
        m["random"],
        tests.join(", ")
    );
    c.report("A1", "strategy ordering", summary)
}

/// A2: on the partial config, Full beats JustNo with p < 0.1.
pub fn a2_partial_learnability(config: &WorldConfig) -> CriterionReport {
    let mut c = Checks::new();
    let result = match run_experiment(&StrategyRegistry::builtin(), config, &["full", "just-no"], &seeds()) {
        Ok(r) => r,
        Err(e) => {
            c.check(false, e.to_string());
            return c.report("A2", "partial-correction learnability", String::new());
        }
    };
    let summary = result.summary();
    let (full, just_no) = (&summary[0], &summary[1]);
    c.check(full.mean < just_no.mean, "full < just-no");
    let p = match result.compare("full", "just-no") {
        Ok(w) => w.p,
        Err(e) => {
            c.check(false, e.to_string());
            f64::NAN
        }
    };
    c.check(p < 0.1, format!("p={p:.2e}"));
    c.report(
        "A2",
        "partial-correction learnability",
        format!(
            "full={:.1}±{:.1} just-no={:.1}±{:.1} p={p:.2e}",
            full.mean, full.std_dev, just_no.mean, just_no.std_dev
        ),
    )
}

/// A3: at most 10% corrections in the final 25 steps on at least 8 seeds.
pub fn a3_convergence(config: &WorldConfig) -> CriterionReport {
    let mut c = Checks::new();
    let result = match run_experiment(&StrategyRegistry::builtin(), config, &["full"], &seeds()) {
        Ok(r) => r,
        Err(e) => {
            c.check(false, e.to_string());
            return c.report("A3", "convergence", String::new());
        }
    };
    let rates: Vec<f64> = result.trials["full"]
        .iter()
        .map(|t| t.tail_correction_rate(25))
        .collect();
    let good = rates.iter().filter(|&&r| r <= 0.10).count();
    c.check(good >= 8, format!("{good}/10 seeds converged"));
    let shown: Vec<String> = rates.iter().map(|r| format!("{:.0}%", r * 100.0)).collect();
    c.report(
        "A3",
        "convergence",
        format!("{good}/10 seeds at <=10% over the last 25 steps ({})", shown.join(" ")),
    )
}

/// A4: variable elimination against brute-force enumeration on 200 random
/// nets of at most 8 nodes.
pub fn a4_inference_oracle() -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut c = Checks::new();
    for _ in 0..200 {
        let def = RandomNet::random(8, &mut rng);
        let net = def.build();
        for _ in 0..3 {
            let evidence = def.random_evidence(&mut rng);
            match net.probability_of(&evidence) {
                Ok(p) => worst = worst.max((p - def.brute_force(&evidence)).abs()),
                Err(e) => c.check(false, e.to_string()),
            }
        }
    }
    c.check(worst <= 1e-9, format!("max |delta|={worst:.2e}"));
    c.report(
        "A4",
        "inference oracle",
        format!("200 nets x 3 evidence sets, max |delta|={worst:.2e}"),
    )
}

/// A5: Beta beliefs, wKDE values, the prior fallback and the X+ gate.
pub fn a5_unit_math() -> CriterionReport {
    let mut c = Checks::new();
    let tol = 1e-12;

    let rule = Rule::new(RuleBody::colour("red"), "quickly");
    let mut store = RuleStore::default();
    store.add_positive(&rule, 1.0).expect("valid weight");
    c.close("beta(+1)", store.belief(&rule), 2.0 / 3.0, tol);
    let mut store = RuleStore::default();
    store.add_positive(&rule, 0.6).expect("valid weight");
    c.close("beta(+0.6)", store.belief(&rule), 1.6 / 2.6, tol);
    let mut store = RuleStore::default();
    store.add_negative(&rule, 1.0).expect("valid weight");
    c.close("beta(-1)", store.belief(&rule), 1.0 / 3.0, tol);
    store.confirm(&rule);
    store.add_negative(&rule, 1.0).expect("valid weight");
    c.close("confirmed", store.belief(&rule), 1.0, 0.0);

    let h = 25.0;
    let x = Rgb::new(200, 30, 30);
    let y = Rgb::new(230, 60, 10);
    let z = Rgb::new(215, 40, 25);
    let mut g = GroundingModel::default();
    c.close("empty posterior", g.posterior("red", &x), 0.2, 0.0);
    g.ensure_colour("red");
    c.close("ensured posterior", g.posterior("red", &x), 0.2, 0.0);
    g.add_exemplar("red", 1.0, x).expect("valid weight");
    let peak = oracle::kernel(0.0, h);
    c.close(
        "wkde peak",
        g.likelihood("red", &x).unwrap_or(f64::NAN),
        peak,
        tol * peak,
    );
    let mut g2 = GroundingModel::default();
    g2.add_exemplar("red", 1.0, x).expect("valid weight");
    g2.add_exemplar("red", 1.0, y).expect("valid weight");
    let avg = (oracle::kernel(x.squared_distance(&z), h) + oracle::kernel(y.squared_distance(&z), h)) / 2.0;
    c.close(
        "wkde {1,1}",
        g2.likelihood("red", &z).unwrap_or(f64::NAN),
        avg,
        tol * avg,
    );
    let mut g3 = GroundingModel::default();
    g3.add_exemplar("red", 0.25, x).expect("valid weight");
    g3.add_exemplar("red", 0.75, y).expect("valid weight");
    let weighted =
        (1.0 * oracle::kernel(x.squared_distance(&z), h) + 3.0 * oracle::kernel(y.squared_distance(&z), h)) / 4.0;
    let l3 = g3.likelihood("red", &z).unwrap_or(f64::NAN);
    c.close("wkde {1,3}", l3, weighted, tol * weighted);
    let background = 1.0 / 256f64.powi(3);
    let post = weighted * 0.2 / (weighted * 0.2 + background * 0.8);
    c.close("posterior", g3.posterior("red", &z), post, tol);

    let (above, below) = x_plus_gate();
    c.check(above, "X+ added at belief*match 0.75 > 0.7");
    c.check(!below, "X+ withheld at belief*match 2/3 < 0.7");
    let (above, below) = x_plus_gate_colour();
    c.check(above, "X+ added when belief*posterior > 0.7");
    c.check(!below, "X+ withheld when belief*posterior < 0.7");

    let n = c.notes.len();
    c.report("A5", "unit math", format!("{n} fixtures"))
}

fn gate_lexicon() -> AgentConfig {
    AgentConfig::new(
        [Shape::new("square")],
        [
            ("gently".to_string(), Dimension::Energy),
            ("firmly".to_string(), Dimension::Energy),
        ],
    )
}

/// Shape-only rules match with probability 1, so the joint is the belief.
fn x_plus_gate() -> (bool, bool) {
    let s = Situation::new(Shape::new("square"), Rgb::new(0, 0, 0));
    let p = crate::domain::BehaviourPoint::new(0.5, 0.2, 0.5).expect("in range");
    let rule = Rule::new(RuleBody::shape(Shape::new("square")), "gently");
    let run = |positives: usize| {
        let mut l = Learner::new(LearnerKind::Full, &gate_lexicon());
        for _ in 0..positives {
            l.rules_mut().add_positive(&rule, 1.0).expect("valid weight");
        }
        l.ingest(&s, &p, &Utterance::Assent, None).expect("assent ingests");
        l.behaviour().get("gently").is_some_and(|m| m.positives() == [0.2])
    };
    // alpha = 3 gives 0.75, alpha = 2 gives 2/3
    (run(2), run(1))
}

/// Confirmed colour rule, so the joint is the colour posterior.
fn x_plus_gate_colour() -> (bool, bool) {
    let p = crate::domain::BehaviourPoint::new(0.5, 0.2, 0.5).expect("in range");
    let rule = Rule::new(RuleBody::colour("red"), "gently");
    let run = |query: Rgb| {
        let mut l = Learner::new(LearnerKind::Full, &gate_lexicon());
        l.rules_mut().confirm(&rule);
        l.grounding_mut()
            .add_exemplar("red", 1.0, Rgb::new(220, 20, 20))
            .expect("valid weight");
        let post = l.grounding().posterior("red", &query);
        let s = Situation::new(Shape::new("square"), query);
        l.ingest(&s, &p, &Utterance::Assent, None).expect("assent ingests");
        let added = l.behaviour().get("gently").is_some_and(|m| !m.positives().is_empty());
        (post, added)
    };
    let (near_post, near) = run(Rgb::new(220, 20, 20));
    let (far_post, far) = run(Rgb::new(150, 80, 80));
    (near_post > 0.7 && near, far_post < 0.7 && far)
}

/// A6: 10,000 simulated episodes, every teacher utterance truthful.
pub fn a6_coherence(configs: &[&WorldConfig]) -> CriterionReport {
    let mut c = Checks::new();
    let mut episodes = 0usize;
    let mut bad = 0usize;
    let mut kinds: BTreeMap<&'static str, usize> = BTreeMap::new();
    for (k, cfg) in configs.iter().enumerate() {
        let gt = match cfg.ground_truth() {
            Ok(gt) => gt,
            Err(e) => {
                c.check(false, e.to_string());
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(77 + k as u64);
        let n = 10_000 / configs.len();
        for _ in 0..n {
            episodes += 1;
            let s = gt.generate_situation(cfg.constrained_fraction, &mut rng);
            let p = oracle::uniform_point(&mut rng);
            let u = gt.give_feedback(&s, &p);

            // independent reading of the config
            let in_colour = |name: &str| {
                cfg.colours.iter().any(|d| {
                    d.name == name
                        && (d.r[0]..=d.r[1]).contains(&s.rgb.r)
                        && (d.g[0]..=d.g[1]).contains(&s.rgb.g)
                        && (d.b[0]..=d.b[1]).contains(&s.rgb.b)
                })
            };
            let holds = |colour: Option<&str>, shape: Option<&str>| {
                colour.is_none_or(in_colour) && shape.is_none_or(|x| x == s.shape.as_str())
            };
            let misses = |adverb: &str| {
                cfg.adverbs
                    .iter()
                    .find(|a| a.name == adverb)
                    .is_some_and(|a| !(a.interval[0] <= p.get(a.dimension) && p.get(a.dimension) <= a.interval[1]))
            };
            let violated: Vec<_> = cfg
                .rules
                .iter()
                .filter(|r| holds(r.colour.as_deref(), r.shape.as_deref()) && misses(&r.head))
                .collect();

            let ok = match &u {
                Utterance::Assent => {
                    *kinds.entry("assent").or_default() += 1;
                    violated.is_empty()
                }
                Utterance::FullCorrection { body, adverbs } => {
                    *kinds.entry("full").or_default() += 1;
                    holds(body.colour_atom(), body.shape_atom().map(Shape::as_str))
                        && adverbs.iter().all(|a| violated.iter().any(|r| r.head == *a))
                        && adverbs.iter().all(|a| {
                            cfg.rules.iter().any(|r| {
                                r.head == *a
                                    && r.policy == Policy::Full
                                    && r.colour.as_deref() == body.colour_atom()
                                    && r.shape.as_deref() == body.shape_atom().map(Shape::as_str)
                            })
                        })
                }
                Utterance::PartialCorrection { adverbs } => {
                    *kinds.entry("partial").or_default() += 1;
                    !adverbs.is_empty() && adverbs.iter().all(|a| violated.iter().any(|r| r.head == *a))
                }
            };
            if !ok {
                bad += 1;
            }
        }
    }
    c.check(bad == 0, format!("{bad} untruthful utterances"));
    c.check(episodes >= 10_000, format!("{episodes} episodes"));
    let mix: Vec<String> = kinds.iter().map(|(k, n)| format!("{k}={n}")).collect();
    c.report(
        "A6",
        "coherence soundness",
        format!("{episodes} episodes, {bad} violations ({})", mix.join(" ")),
    )
}

fn grammar_lexicon() -> Lexicon {
    Lexicon::new(
        ["square", "circle", "triangle"].map(Shape::new),
        [
            ("gently".to_string(), Dimension::Energy),
            ("firmly".to_string(), Dimension::Energy),
            ("slowly".to_string(), Dimension::Speed),
            ("quickly".to_string(), Dimension::Speed),
        ],
    )
}

/// A7: render then parse is the identity on 1,000 utterances; the three
/// canonical strings parse as expected.
pub fn a7_grammar_round_trip() -> CriterionReport {
    let mut c = Checks::new();
    let lexicon = grammar_lexicon();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let u = oracle::random_utterance(&lexicon, &mut rng);
        let text = render_utterance(&u);
        match parse_utterance(&text, &lexicon) {
            Ok(p) if p.utterance == u => {}
            _ => mismatches += 1,
        }
    }
    c.check(mismatches == 0, format!("{mismatches} round-trip mismatches"));

    let expect = [
        ("yes", Utterance::Assent),
        (
            "no, when you see red squares do it gently and slowly",
            Utterance::FullCorrection {
                body: RuleBody::colour_and_shape("red", Shape::new("square")),
                adverbs: vec!["gently".into(), "slowly".into()],
            },
        ),
        (
            "no, do it quickly",
            Utterance::PartialCorrection {
                adverbs: vec!["quickly".into()],
            },
        ),
    ];
    for (text, want) in expect {
        let got = parse_utterance(text, &lexicon).map(|p| p.utterance);
        c.check(got.as_ref() == Ok(&want), format!("'{text}'"));
    }
    let conflict = parse_utterance("no, do it gently and firmly", &lexicon);
    c.check(
        conflict.is_err_and(|e| e.code() == "DimensionConflict"),
        "'no, do it gently and firmly' is a dimension conflict",
    );
    c.report(
        "A7",
        "grammar round-trip",
        format!("1000 generated utterances, {mismatches} mismatches; canonical strings checked"),
    )
}

/// A8: colour posterior after 20 clustered exemplars; adverb sampling after
/// 10 positives in [0.1, 0.3].
pub fn a8_convergence_of_models() -> CriterionReport {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let centre = Rgb::new(220, 30, 30);
    let mut g = GroundingModel::default();
    for _ in 0..20 {
        use rand::Rng;
        let jitter = |v: u8, r: &mut ChaCha8Rng| (i16::from(v) + r.random_range(-5i16..=5)).clamp(0, 255) as u8;
        let x = Rgb::new(
            jitter(centre.r, &mut rng),
            jitter(centre.g, &mut rng),
            jitter(centre.b, &mut rng),
        );
        g.add_exemplar("red", 1.0, x).expect("valid weight");
    }
    let at_cluster = g.posterior("red", &centre);
    let at_corner = g.posterior("red", &Rgb::new(0, 255, 255));
    c.check(at_cluster >= 0.9, format!("posterior at cluster {at_cluster:.4}"));
    c.check(
        at_corner <= 0.25,
        format!("posterior at opposite corner {at_corner:.4}"),
    );

    let mut m = AdverbModel::new(
        AdverbConcept {
            name: "gently".into(),
            dimension: Dimension::Energy,
        },
        ModelParams::default(),
    );
    for i in 0..10 {
        m.add_positive(0.1 + 0.2 * f64::from(i) / 9.0).expect("in range");
    }
    let inside = (0..1000).filter(|_| m.sample(&mut rng) <= 0.5).count();
    c.check(inside >= 950, format!("{inside}/1000 samples in [0, 0.5]"));
    c.report(
        "A8",
        "grounding and behaviour convergence",
        format!(
            "posterior {at_cluster:.4} at cluster, {at_corner:.2e} at far corner; {inside}/1000 samples in [0, 0.5] (mu={:.3}, sigma={:.3})",
            m.mu(),
            m.sigma()
        ),
    )
}

/// Runs A1 to A8. `fully` drives A1, A3 and A6; `partial` drives A2 and A6.
pub fn run_all(fully: &WorldConfig, partial: &WorldConfig) -> Vec<CriterionReport> {
    vec![
        a1_strategy_ordering(fully),
        a2_partial_learnability(partial),
        a3_convergence(fully),
        a4_inference_oracle(),
        a5_unit_math(),
        a6_coherence(&[fully, partial]),
        a7_grammar_round_trip(),
        a8_convergence_of_models(),
    ]
}
