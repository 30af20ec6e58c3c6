//! The batch subcommands, written against `impl Write` so tests can capture
//! their output.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use manner_core::acceptance::{run_all, CriterionReport};
use manner_core::experiment::{
    export_csv, export_curves, run_experiment, ExperimentError, ExperimentResult, ExportError,
};
use manner_core::world::{ConfigError, WorldConfig};
use manner_core::StrategyRegistry;

use crate::session::{Mode, Session, SessionError};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("output: {0}")]
    Output(#[from] io::Error),
}

/// A path to a TOML file, or failing that a preset name.
pub fn resolve_config(source: Option<&str>) -> Result<WorldConfig, ConfigError> {
    match source {
        None => Ok(WorldConfig::fully_expressed()),
        Some(s) if Path::new(s).is_file() => WorldConfig::load(s),
        Some(s) => WorldConfig::preset(s),
    }
}

pub struct RunOutputs {
    pub result: ExperimentResult,
    pub regret_csv: PathBuf,
    pub curves_csv: PathBuf,
}

/// Runs every strategy on seeds `0..seeds`, writes `regret.csv` and
/// `curves.csv` under `out`, and prints the summary table.
pub fn run(
    config: &WorldConfig,
    strategies: &[&str],
    seeds: u64,
    out: &Path,
    w: &mut impl Write,
) -> Result<RunOutputs, CommandError> {
    let seeds: Vec<u64> = (0..seeds).collect();
    let result = run_experiment(&StrategyRegistry::builtin(), config, strategies, &seeds)?;
    std::fs::create_dir_all(out).map_err(|source| CommandError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let regret_csv = out.join("regret.csv");
    let curves_csv = out.join("curves.csv");
    export_csv(&result, &regret_csv)?;
    export_curves(&result, &curves_csv)?;

    writeln!(w, "{:<12} {:>8} {:>8}", "strategy", "mean", "sd")?;
    for s in result.summary() {
        writeln!(w, "{:<12} {:>8.2} {:>8.2}", s.strategy, s.mean, s.std_dev)?;
    }
    for (a, b, test) in result.pairwise() {
        match test {
            Ok(t) => writeln!(w, "{a} vs {b}: t={:.3} dof={:.2} p={:.3e}", t.t, t.dof, t.p)?,
            Err(e) => writeln!(w, "{a} vs {b}: {e}")?,
        }
    }
    writeln!(w, "wrote {} and {}", regret_csv.display(), curves_csv.display())?;
    Ok(RunOutputs {
        result,
        regret_csv,
        curves_csv,
    })
}

/// Prints one line per acceptance criterion.
pub fn check(
    fully: &WorldConfig,
    partial: &WorldConfig,
    w: &mut impl Write,
) -> Result<Vec<CriterionReport>, CommandError> {
    let reports = run_all(fully, partial);
    for r in &reports {
        writeln!(w, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    writeln!(w, "{} passed, {failed} failed", reports.len() - failed)?;
    Ok(reports)
}

/// One simulated session, narrated step by step.
pub fn demo(
    config: &WorldConfig,
    strategy: &str,
    steps: usize,
    seed: u64,
    w: &mut impl Write,
) -> Result<(), CommandError> {
    let mut session = Session::new(
        "demo".into(),
        &StrategyRegistry::builtin(),
        strategy,
        Mode::Simulated,
        config.clone(),
        seed,
    )?;
    for _ in 0..steps {
        let v = session.step()?;
        let rgb = v.situation.rgb;
        let option = session
            .current()
            .and_then(|c| c.action.option.as_ref())
            .map(|o| {
                let words: Vec<&str> = o.chosen.values().map(String::as_str).collect();
                if words.is_empty() {
                    "-".to_string()
                } else {
                    words.join("+")
                }
            })
            .unwrap_or_else(|| "n/a".to_string());
        writeln!(
            w,
            "#{:<3} {:<8} ({:>3},{:>3},{:>3})  manner {:<16} speed {:.2} energy {:.2} direction {:.2}  teacher: {:<50} regret {}",
            v.step,
            v.situation.shape.as_str(),
            rgb.r,
            rgb.g,
            rgb.b,
            option,
            v.point.speed(),
            v.point.energy(),
            v.point.direction(),
            v.simulated_feedback.as_deref().unwrap_or(""),
            session.cumulative_regret()
        )?;
    }
    let beliefs = session.beliefs();
    writeln!(w, "\nrules:")?;
    for r in &beliefs.rules {
        let mark = if r.confirmed { " (confirmed)" } else { "" };
        writeln!(
            w,
            "  {:<40} belief {:.3}  alpha {:.2} beta {:.2}{mark}",
            r.rule, r.belief, r.alpha, r.beta
        )?;
    }
    writeln!(w, "adverbs:")?;
    for a in &beliefs.adverbs {
        writeln!(
            w,
            "  {:<10} {:<9} mu {:.3} sigma {:.3}  X+ {} X- {}",
            a.name,
            a.dimension.as_str(),
            a.mu,
            a.sigma,
            a.pos_count,
            a.neg_count
        )?;
    }
    writeln!(w, "colours:")?;
    for c in &beliefs.colours {
        writeln!(w, "  {:<10} {} exemplars", c.name, c.exemplar_count)?;
    }
    Ok(())
}
