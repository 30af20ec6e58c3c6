use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentResult;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ExportError + '_ {
    move |source| ExportError::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// One line of the per-step regret table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub strategy: String,
    pub trial: u64,
    pub step: usize,
    pub corrected: bool,
    pub cumulative_regret: u32,
}

/// Columns: `strategy,trial,step,corrected,cumulative_regret`; `trial` is
/// the seed.
pub fn export_csv(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for (strategy, trials) in &result.trials {
        for t in trials {
            for s in &t.steps {
                w.serialize(CsvRow {
                    strategy: strategy.clone(),
                    trial: t.seed,
                    step: s.index,
                    corrected: s.corrected,
                    cumulative_regret: s.cumulative_regret,
                })
                .map_err(csv_err(path))?;
            }
        }
    }
    w.flush().map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Columns: `strategy,step,mean_cumulative_regret`.
pub fn export_curves(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["strategy", "step", "mean_cumulative_regret"])
        .map_err(csv_err(path))?;
    for (strategy, curve) in result.curves() {
        for (step, v) in curve.iter().enumerate() {
            w.write_record([strategy.as_str(), &step.to_string(), &v.to_string()])
                .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>, ExportError> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

/// Terminal regret per strategy and trial, rebuilt from exported rows.
pub fn terminal_regrets_from_rows(rows: &[CsvRow]) -> BTreeMap<String, Vec<f64>> {
    let mut last: BTreeMap<(String, u64), (usize, u32)> = BTreeMap::new();
    for row in rows {
        let e = last.entry((row.strategy.clone(), row.trial)).or_insert((0, 0));
        if row.step >= e.0 {
            *e = (row.step, row.cumulative_regret);
        }
    }
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((s, _), (_, r)) in last {
        out.entry(s).or_default().push(f64::from(r));
    }
    out
}
