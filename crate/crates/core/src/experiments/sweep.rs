//! Step-level CSV datasets and their re-ingestion.
//!
//! One row per `(trial, step)`. Floats use 17 significant digits
//! (`{:.16e}`), which round-trips every `f64` exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::construction::{RunSummary, StepRecord};
use crate::error::ExperimentError;

/// Column order of every step CSV.
pub const COLUMNS: [&str; 18] = [
    "trial",
    "n",
    "q",
    "p",
    "w",
    "intensity",
    "a_n",
    "poisson_count",
    "admissible_count",
    "hit",
    "wedge",
    "decrement",
    "exact_s_n",
    "miss_probability",
    "ell_before",
    "ell_after",
    "parent_longest_side",
    "child_longest_side",
];

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes rows to CSV, one writer per output.
pub struct StepCsvWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> StepCsvWriter<W> {
    pub fn new(sink: W) -> Result<Self, ExperimentError> {
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write_trial(&mut self, trial: u64, steps: &[StepRecord]) -> Result<(), ExperimentError> {
        for r in steps {
            let row = [
                trial.to_string(),
                r.n.to_string(),
                r.q.to_string(),
                r.p.to_string(),
                r.w.to_string(),
                format_f64(r.intensity),
                format_f64(r.a_n),
                r.poisson_count.to_string(),
                r.admissible_count.to_string(),
                u8::from(r.hit).to_string(),
                r.wedge.to_string(),
                format_f64(r.decrement),
                format_f64(r.exact_s_n),
                format_f64(r.miss_probability),
                format_f64(r.ell_before),
                format_f64(r.ell_after),
                format_f64(r.parent_longest_side),
                format_f64(r.child_longest_side),
            ];
            self.inner.write_record(&row)?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), ExperimentError> {
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, ExperimentError> {
        self.inner.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))
    }
}

/// Renders trials to an in-memory CSV.
pub fn steps_to_csv(trials: &[(u64, &[StepRecord])]) -> Result<Vec<u8>, ExperimentError> {
    let mut w = StepCsvWriter::new(Vec::new())?;
    for (trial, steps) in trials {
        w.write_trial(*trial, steps)?;
    }
    w.into_inner()
}

fn ingest_err(row: usize, detail: impl Into<String>) -> ExperimentError {
    ExperimentError::Ingest { row, detail: detail.into() }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, row: usize) -> Result<T, ExperimentError> {
    let raw = rec.get(idx).ok_or_else(|| ingest_err(row, format!("missing column {}", COLUMNS[idx])))?;
    raw.parse().map_err(|_| ingest_err(row, format!("bad {} value `{raw}`", COLUMNS[idx])))
}

/// Parses a step CSV back into `(trial, steps)` groups in file order.
///
/// Rows of one trial must be contiguous and numbered `1, 2, ...`.
pub fn ingest_csv<R: Read>(source: R) -> Result<Vec<(u64, Vec<StepRecord>)>, ExperimentError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(ingest_err(0, "unexpected header"));
    }
    let mut out: Vec<(u64, Vec<StepRecord>)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if rec.len() != COLUMNS.len() {
            return Err(ingest_err(row, format!("expected {} fields, found {}", COLUMNS.len(), rec.len())));
        }
        let trial: u64 = field(&rec, 0, row)?;
        let hit = match rec.get(9) {
            Some("0") => false,
            Some("1") => true,
            other => return Err(ingest_err(row, format!("bad hit value {other:?}"))),
        };
        let step = StepRecord {
            n: field(&rec, 1, row)?,
            q: field(&rec, 2, row)?,
            p: field(&rec, 3, row)?,
            w: field(&rec, 4, row)?,
            intensity: field(&rec, 5, row)?,
            a_n: field(&rec, 6, row)?,
            poisson_count: field(&rec, 7, row)?,
            admissible_count: field(&rec, 8, row)?,
            hit,
            wedge: field(&rec, 10, row)?,
            decrement: field(&rec, 11, row)?,
            exact_s_n: field(&rec, 12, row)?,
            miss_probability: field(&rec, 13, row)?,
            ell_before: field(&rec, 14, row)?,
            ell_after: field(&rec, 15, row)?,
            parent_longest_side: field(&rec, 16, row)?,
            child_longest_side: field(&rec, 17, row)?,
        };
        match out.last_mut() {
            Some((t, steps)) if *t == trial => {
                if step.n != steps.len() + 1 {
                    return Err(ingest_err(row, format!("trial {trial}: step {} follows {}", step.n, steps.len())));
                }
                steps.push(step);
            }
            _ => {
                if out.iter().any(|(t, _)| *t == trial) {
                    return Err(ingest_err(row, format!("trial {trial} is not contiguous")));
                }
                if step.n != 1 {
                    return Err(ingest_err(row, format!("trial {trial} starts at step {}", step.n)));
                }
                out.push((trial, vec![step]));
            }
        }
    }
    Ok(out)
}

/// Per-trial statistics recoverable from step rows alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub trial: u64,
    pub steps: usize,
    pub hits: usize,
    pub hit_count: BTreeMap<u64, u64>,
    pub ell_trajectory: Vec<f64>,
    pub total_decrement: f64,
    pub min_miss_probability: f64,
}

impl RunStats {
    pub fn from_steps(trial: u64, steps: &[StepRecord]) -> Self {
        let mut hit_count = BTreeMap::new();
        for s in steps.iter().filter(|s| s.hit) {
            *hit_count.entry(s.q).or_insert(0) += 1;
        }
        let mut ell_trajectory: Vec<f64> = steps.first().map(|s| vec![s.ell_before]).unwrap_or_default();
        ell_trajectory.extend(steps.iter().map(|s| s.ell_after));
        Self {
            trial,
            steps: steps.len(),
            hits: steps.iter().filter(|s| s.hit).count(),
            hit_count,
            ell_trajectory,
            total_decrement: steps.iter().map(|s| s.decrement).sum(),
            min_miss_probability: steps.iter().map(|s| s.miss_probability).fold(f64::INFINITY, f64::min),
        }
    }

    /// Statistics taken from the summary's own aggregates where it has them.
    pub fn from_summary(trial: u64, summary: &RunSummary) -> Self {
        Self {
            hits: summary.hits(),
            hit_count: summary.hit_count.clone(),
            ell_trajectory: summary.ell_trajectory.clone(),
            ..Self::from_steps(trial, &summary.steps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{run, RunConfig};
    use crate::geometry::Triangle;

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -0.0, 1.0, 1.0 / 3.0, 5e-324, f64::MAX, -2.5e-300, std::f64::consts::PI] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_round_trip_reproduces_stats() {
        let a = run(&RunConfig::new(Triangle::canonical(), 40, 3)).unwrap();
        let b = run(&RunConfig { stream: 1, ..RunConfig::new(Triangle::canonical(), 25, 3) }).unwrap();
        let bytes = steps_to_csv(&[(0, &a.steps), (1, &b.steps)]).unwrap();
        let back = ingest_csv(bytes.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].1, a.steps);
        assert_eq!(back[1].1, b.steps);
        assert_eq!(RunStats::from_steps(0, &back[0].1), RunStats::from_summary(0, &a));
        assert_eq!(RunStats::from_steps(1, &back[1].1), RunStats::from_summary(1, &b));
    }

    #[test]
    fn ingest_rejects_malformed() {
        let a = run(&RunConfig::new(Triangle::canonical(), 3, 3)).unwrap();
        let good = String::from_utf8(steps_to_csv(&[(0, &a.steps)]).unwrap()).unwrap();
        let lines: Vec<&str> = good.lines().collect();
        let bad_cases = [
            good.replacen("trial", "trail", 1),
            format!("{}\n{}\n{}\n", lines[0], lines[2], lines[1]),
            format!("{}\n{}\n", lines[0], lines[1].replacen(",1,", ",x,", 1)),
            format!("{}\n{}\n", lines[0], &lines[1][..lines[1].len() - 3]).replace(",", ";"),
            format!("{}\n{},extra\n", lines[0], lines[1]),
        ];
        for case in bad_cases {
            assert!(ingest_csv(case.as_bytes()).is_err(), "{case}");
        }
        assert!(ingest_csv(format!("{}\n", lines[0]).as_bytes()).unwrap().is_empty());
    }
}
