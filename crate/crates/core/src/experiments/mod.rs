//! Configuration, batch orchestration, verification, reports and figures.
//!
//! [`execute`] runs one configured mode and writes its outputs below
//! `config.out`:
//!
//! ```text
//! runs/<mode>.csv       step rows (simulate, sweep)
//! reports/<mode>.json   summaries and check results
//! figures/<mode>.svg    drawings (theorem, render)
//! manifest.json         file list, completeness, timestamps, runtimes
//! ```
//!
//! Everything except the manifest is a function of the configuration.

pub mod config;
pub mod miss;
pub mod report;
pub mod svg;
pub mod sweep;
pub mod verify;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::InscribedChainPair;
use crate::construction::{a_schedule, length_floor, run_with_table, shrinkage_holds, RunConfig, RunSummary};
use crate::error::ExperimentError;
use crate::pseudolattice::PrimePowerTable;
use crate::sampler::stream_id;

pub use config::{ExperimentConfig, Mode};
pub use miss::{estimate_miss_rate, MissRow};
pub use report::{CriterionResult, Manifest, OutputDir, Report};
pub use svg::{render_svg, Snapshot};
pub use sweep::{ingest_csv, RunStats, COLUMNS};
pub use verify::verify_lemma_suite;

/// Result of [`execute`].
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Whether every check the mode executed passed.
    pub passed: bool,
    /// One human-readable line per check.
    pub lines: Vec<String>,
    pub manifest: Manifest,
}

/// Per-trial checks of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: u64,
    pub stream: u64,
    pub steps: usize,
    pub hits: usize,
    pub ell_first: f64,
    pub ell_last: f64,
    pub floor: f64,
    pub floor_ok: bool,
    pub contract_ok: bool,
    pub shrink_ok: bool,
}

impl TrialReport {
    fn from_summary(trial: u64, s: &RunSummary, config: &ExperimentConfig) -> Self {
        let tol = &config.tolerances;
        let first = s.ell_trajectory[0];
        let last = *s.ell_trajectory.last().expect("trajectory is nonempty");
        let floor = length_floor(s.steps.len());
        Self {
            trial,
            stream: s.stream,
            steps: s.steps.len(),
            hits: s.hits(),
            ell_first: first,
            ell_last: last,
            floor,
            floor_ok: last / first >= floor - tol.floor_slack,
            contract_ok: s.steps.iter().all(|r| {
                let drop = r.ell_before - r.ell_after;
                drop >= -tol.nonneg_slack && drop <= r.a_n + tol.decrement_slack
            }),
            shrink_ok: shrinkage_holds(s),
        }
    }

    fn passed(&self) -> bool {
        self.floor_ok && self.contract_ok && self.shrink_ok
    }

    fn line(&self) -> String {
        format!(
            "[{}] trial {} steps={} hits={} ell {:.6e} -> {:.6e} (floor ratio {:.6e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.trial,
            self.steps,
            self.hits,
            self.ell_first,
            self.ell_last,
            self.floor
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub horizon: usize,
    pub trials: Vec<TrialReport>,
    /// Statistics recomputed from the CSV that was written.
    pub reingested: Vec<RunStats>,
    pub reingest_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremTrial {
    pub trial: u64,
    pub strictly_convex: bool,
    pub polyline_vertices: usize,
    pub hits: u64,
    pub offsets: Vec<Option<usize>>,
    pub wedge_success: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub seed: u64,
    pub wedges: usize,
    pub horizon: usize,
    pub radius: f64,
    pub early_mean_hits: f64,
    pub late_mean_hits: f64,
    pub trend_ok: bool,
    pub trials: Vec<TheoremTrial>,
    /// `per_n_hits` averaged over trials.
    pub mean_hits_per_step: Vec<f64>,
}

fn run_config(config: &ExperimentConfig, trial: u64) -> RunConfig {
    RunConfig {
        stream: stream_id(trial, 0),
        intensity: config.intensity,
        mode: config.poisson,
        ..RunConfig::new(config.triangle, config.horizon, config.seed)
    }
}

fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    out: OutputDir,
    table: Arc<PrimePowerTable>,
    runtimes: BTreeMap<String, f64>,
}

impl Context<'_> {
    fn time<T>(&mut self, phase: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let r = f(self);
        self.runtimes.insert(phase.to_string(), start.elapsed().as_secs_f64() * 1e3);
        r
    }
}

/// Runs trials in parallel and writes every successful one, in trial order,
/// through a single CSV writer. The first failure is returned after the
/// partial file has been flushed.
fn run_trials_to_csv(ctx: &mut Context, name: &str) -> Result<(Vec<RunSummary>, Vec<RunStats>), ExperimentError> {
    let config = ctx.config;
    let table = ctx.table.clone();
    let results: Vec<Result<RunSummary, ExperimentError>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_with_table(&run_config(config, t), table.clone()).map_err(ExperimentError::from))
        .collect();
    let path = ctx.out.file("runs", &format!("{name}.csv"));
    let mut writer = sweep::StepCsvWriter::new(BufWriter::new(File::create(&path)?))?;
    let mut summaries = Vec::with_capacity(results.len());
    let mut first_error = None;
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => {
                writer.write_trial(t as u64, &s.steps)?;
                summaries.push(s);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    writer.flush()?;
    drop(writer);
    if let Some(e) = first_error {
        return Err(e);
    }
    let reingested: Vec<RunStats> = ingest_csv(File::open(&path)?)?
        .iter()
        .map(|(t, steps)| RunStats::from_steps(*t, steps))
        .collect();
    Ok((summaries, reingested))
}

fn simulate(ctx: &mut Context) -> Result<(bool, Vec<String>), ExperimentError> {
    let name = ctx.config.mode.name();
    let (summaries, reingested) = ctx.time("trials", |c| run_trials_to_csv(c, name))?;
    let config = ctx.config;
    let trials: Vec<TrialReport> = summaries
        .iter()
        .enumerate()
        .map(|(t, s)| TrialReport::from_summary(t as u64, s, config))
        .collect();
    let expected: Vec<RunStats> = summaries.iter().enumerate().map(|(t, s)| RunStats::from_summary(t as u64, s)).collect();
    let reingest_exact = expected == reingested;
    let report = SimulationReport { seed: config.seed, horizon: config.horizon, trials, reingested, reingest_exact };
    write_json(&ctx.out.file("reports", &format!("{name}.json")), &report)?;
    let mut lines: Vec<String> = report.trials.iter().map(TrialReport::line).collect();
    lines.push(format!(
        "[{}] CSV re-ingest reproduces the run statistics",
        if reingest_exact { "PASS" } else { "FAIL" }
    ));
    let passed = reingest_exact && report.trials.iter().all(TrialReport::passed);
    Ok((passed, lines))
}

fn theorem(ctx: &mut Context) -> Result<(bool, Vec<String>), ExperimentError> {
    let config = ctx.config;
    let table = ctx.table.clone();
    let results = ctx.time("trials", |_| verify::theorem_trials(config, config.trials, config.horizon, &table))?;
    let (early, late) = verify::theorem_trend(&results, config.horizon);
    let trend_ok = late > early;
    let trials: Vec<TheoremTrial> = results
        .iter()
        .enumerate()
        .map(|(t, r)| TheoremTrial {
            trial: t as u64,
            strictly_convex: r.strictly_convex,
            polyline_vertices: r.polyline.len(),
            hits: r.per_n_hits.iter().map(|&h| h as u64).sum(),
            offsets: r.offsets.clone(),
            wedge_success: r.wedge_success.clone(),
        })
        .collect();
    let mean_hits_per_step = (0..config.horizon)
        .map(|n| results.iter().map(|r| r.per_n_hits[n] as f64).sum::<f64>() / results.len() as f64)
        .collect();
    let report = TheoremReport {
        seed: config.seed,
        wedges: config.wedges,
        horizon: config.horizon,
        radius: config.circle.radius,
        early_mean_hits: early,
        late_mean_hits: late,
        trend_ok,
        trials,
        mean_hits_per_step,
    };
    write_json(&ctx.out.file("reports", "theorem.json"), &report)?;
    let pairs: Vec<InscribedChainPair> = results[0]
        .runs
        .iter()
        .map(|r| InscribedChainPair::from_record(&r.final_pair))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&InscribedChainPair> = pairs.iter().collect();
    std::fs::write(ctx.out.file("figures", "theorem.svg"), svg::scene_svg(&refs, None)?)?;

    let mut lines: Vec<String> = report
        .trials
        .iter()
        .map(|t| {
            format!(
                "[{}] trial {} strictly convex, {} vertices, {} hits",
                if t.strictly_convex { "PASS" } else { "FAIL" },
                t.trial,
                t.polyline_vertices,
                t.hits
            )
        })
        .collect();
    lines.push(format!(
        "[{}] mean hits per step: early {early:.6} late {late:.6}",
        if trend_ok { "PASS" } else { "FAIL" }
    ));
    let passed = trend_ok && report.trials.iter().all(|t| t.strictly_convex);
    Ok((passed, lines))
}

fn verify_mode(ctx: &mut Context) -> Result<(bool, Vec<String>), ExperimentError> {
    let report = verify_lemma_suite(ctx.config)?;
    for (id, ms) in &report.runtimes_ms {
        ctx.runtimes.insert(format!("criterion_{id:02}"), *ms);
    }
    std::fs::write(ctx.out.file("reports", "verify.json"), report.body_json())?;
    Ok((report.passed(), report.criteria.iter().map(CriterionResult::line).collect()))
}

fn render(ctx: &mut Context) -> Result<(bool, Vec<String>), ExperimentError> {
    let config = ctx.config;
    let snapshot = match &config.render.snapshot {
        Some(path) => {
            let mut s = Snapshot::from_json_str(&std::fs::read_to_string(path)?)?;
            s.band_alpha = config.render.band_alpha.or(s.band_alpha);
            s
        }
        None => {
            let summary = ctx.time("run", |c| run_with_table(&run_config(config, 0), c.table.clone()))?;
            let pair = InscribedChainPair::from_record(&summary.final_pair)?;
            Snapshot { pair, band_alpha: config.render.band_alpha }
        }
    };
    write_json(&ctx.out.file("reports", "snapshot.json"), &snapshot)?;
    render_svg(&snapshot, &ctx.out.file("figures", "render.svg"))?;
    Ok((
        true,
        vec![format!(
            "[PASS] rendered {} wedges, next budget {:.6e}",
            snapshot.pair.wedge_count(),
            a_schedule(snapshot.pair.wedge_count(), snapshot.pair.ell())
        )],
    ))
}

/// Runs `config.mode` and writes its outputs and manifest below `config.out`.
///
/// Check failures make `Outcome::passed` false; infrastructure failures are
/// returned as errors after a manifest marked incomplete has been written.
pub fn execute(config: &ExperimentConfig) -> Result<Outcome, ExperimentError> {
    config.validate()?;
    let started = report::unix_ms();
    let horizon = match config.mode {
        Mode::Verify => {
            let s = &config.samples;
            s.floor_horizon.max(s.segment_run_horizon).max(s.theorem_horizon).max(s.determinism_horizon)
        }
        _ => config.horizon,
    };
    let mut ctx = Context {
        config,
        out: OutputDir::create(&config.out)?,
        table: Arc::new(PrimePowerTable::with_terms(horizon)),
        runtimes: BTreeMap::new(),
    };
    let result = match config.mode {
        Mode::Simulate | Mode::Sweep => simulate(&mut ctx),
        Mode::Theorem => theorem(&mut ctx),
        Mode::Verify => verify_mode(&mut ctx),
        Mode::Render => render(&mut ctx),
    };
    let mut manifest = Manifest {
        mode: config.mode.name().to_string(),
        seed: config.seed,
        config: config.clone(),
        files: ctx.out.files().to_vec(),
        complete: result.is_ok(),
        checks_passed: false,
        error: None,
        started_unix_ms: started,
        finished_unix_ms: report::unix_ms(),
        runtimes_ms: ctx.runtimes.clone(),
    };
    match result {
        Ok((passed, lines)) => {
            manifest.checks_passed = passed;
            ctx.out.write_manifest(&manifest)?;
            Ok(Outcome { passed, lines, manifest })
        }
        Err(e) => {
            manifest.error = Some(e.to_string());
            ctx.out.write_manifest(&manifest)?;
            Err(e)
        }
    }
}
