//! The verification suite: one check per acceptance criterion.
//!
//! Every check draws from its own stream of the master seed, so the report
//! body is a function of the configuration alone.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::admissible::{admissible_area, amgm_expansion_residual, err, sample_admissible, split_ratios, AdmissibleBand};
use crate::chain::{InscribedChainPair, Wedge};
use crate::construction::{
    assemble_theorem_curve_with_table, length_floor, run_with_table, RunConfig, RunSummary, StepRecord,
    TheoremConfig, TheoremResult,
};
use crate::error::ExperimentError;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::miss::estimate_miss_rate;
use crate::experiments::report::{CriterionResult, Report};
use crate::experiments::sweep::{ingest_csv, steps_to_csv, RunStats};
use crate::geometry::{doubled_area, segment_bound_check_with_slack, Point, Triangle, SHRINK_FACTOR};
use crate::pseudolattice::{prime_power_intensity, verify_partition, PrimePowerTable};
use crate::sampler::{poisson_count, sample_in_wedges, stream_id, SeededGenerator};

fn rng_for(config: &ExperimentConfig, criterion: u32) -> SeededGenerator {
    SeededGenerator::new(config.seed, stream_id(criterion as u64, 0))
}

/// Triangle with vertices uniform in `[-10, 10]^2` and doubled area at least 1.
pub fn random_triangle<R: Rng + ?Sized>(rng: &mut R) -> Triangle {
    loop {
        let mut v = || Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let (a, b, c) = (v(), v(), v());
        if doubled_area(a, b, c).abs() >= 1.0 {
            if let Ok(t) = Triangle::new(a, b, c) {
                return t;
            }
        }
    }
}

/// Budget with `alpha / S^(1/3)` log-uniform in `[1e-3, 3]`, covering both
/// the capped and the uncapped band height.
fn random_alpha<R: Rng + ?Sized>(w: &Wedge, rng: &mut R) -> f64 {
    w.s.cbrt() * 10f64.powf(rng.random_range(-3.0..0.5))
}

/// Mean hits per step over the early window `[1, min(50, H)]` and the late
/// window `[ceil(3H/4), H]`, averaged over trials.
pub fn theorem_trend(results: &[TheoremResult], horizon: usize) -> (f64, f64) {
    let early_end = horizon.min(50);
    let late_start = (3 * horizon).div_ceil(4).max(1);
    let window_mean = |r: &TheoremResult, lo: usize, hi: usize| {
        r.per_n_hits[lo - 1..hi].iter().map(|&h| h as f64).sum::<f64>() / (hi - lo + 1) as f64
    };
    let t = results.len().max(1) as f64;
    let early = results.iter().map(|r| window_mean(r, 1, early_end)).sum::<f64>() / t;
    let late = results.iter().map(|r| window_mean(r, late_start, horizon)).sum::<f64>() / t;
    (early, late)
}

/// Running extremes of the per-step decrement contract.
#[derive(Debug, Clone, Copy)]
pub struct ContractTally {
    pub steps: usize,
    /// Smallest `ell_n - ell_{n+1}`.
    pub min_drop: f64,
    /// Largest `ell_n - ell_{n+1} - a_n`.
    pub max_excess: f64,
}

impl Default for ContractTally {
    fn default() -> Self {
        Self { steps: 0, min_drop: f64::INFINITY, max_excess: f64::NEG_INFINITY }
    }
}

impl ContractTally {
    pub fn add(&mut self, steps: &[StepRecord]) {
        for s in steps {
            let drop = s.ell_before - s.ell_after;
            self.steps += 1;
            self.min_drop = self.min_drop.min(drop);
            self.max_excess = self.max_excess.max(drop - s.a_n);
        }
    }
}

fn check_amgm(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(1, "amgm_identity");
    let mut rng = rng_for(config, 1);
    let tol = config.tolerances.amgm_rel;
    let mut worst = 0.0f64;
    for _ in 0..config.samples.amgm_triples {
        let mut v = || if rng.random_bool(0.05) { 0.0 } else { rng.random_range(-7.0f64..7.0).exp() };
        let (x, y, z) = (v(), v(), v());
        let scale = 1f64.max(x).max(y).max(z);
        worst = worst.max(amgm_expansion_residual(x, y, z)? / scale);
    }
    c.measure("max_scaled_residual", worst).tolerance("amgm_rel", tol);
    c.require(worst <= tol, || format!("residual {worst:e} above {tol:e}"));
    Ok(c)
}

fn check_split_nonnegativity(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(2, "split_nonnegativity");
    let mut rng = rng_for(config, 2);
    let floor = -config.tolerances.err_floor;
    let mut worst = f64::INFINITY;
    for _ in 0..config.samples.lemma_configs {
        let t = random_triangle(&mut rng);
        let p = t.a.lerp(t.c, rng.random());
        let r = t.b.lerp(t.c, rng.random());
        let q = p.lerp(r, rng.random());
        let s1 = doubled_area(t.a, q, p).abs();
        let s2 = doubled_area(t.b, q, r).abs();
        worst = worst.min(err(t.doubled_area().abs(), s1, s2)?);
    }
    c.measure("min_err", worst).tolerance("err_floor", config.tolerances.err_floor);
    c.require(worst >= floor, || format!("err {worst:e} below {floor:e}"));
    Ok(c)
}

fn check_admissible_area(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(3, "admissible_area");
    let mut rng = rng_for(config, 3);
    let sigmas = config.tolerances.area_sigmas;
    c.tolerance("sigmas", sigmas);
    let n = config.samples.area_points;
    for &ratio in &config.samples.area_ratios {
        let t = random_triangle(&mut rng);
        let w = Wedge::from_triangle(&t)?;
        let alpha = ratio * w.s.cbrt();
        let band = AdmissibleBand::new(0, &w, alpha)?;
        let exact = admissible_area(&w, alpha);
        let frac_exact = exact / w.plain_area();
        let hits = (0..n)
            .filter(|_| band.test(crate::sampler::sample_triangle(&t, &mut rng)).is_some())
            .count();
        let frac = hits as f64 / n as f64;
        let sigma = (frac_exact * (1.0 - frac_exact) / n as f64).sqrt();
        let z = (frac - frac_exact).abs() / sigma;
        c.measure(&format!("ratio_{ratio}_exact_area"), exact)
            .measure(&format!("ratio_{ratio}_mc_area"), frac * w.plain_area())
            .measure(&format!("ratio_{ratio}_z"), z);
        c.require(z <= sigmas, || format!("ratio {ratio}: {z:.3} sigma from delta*S/2"));
    }
    Ok(c)
}

fn random_admissible<R: Rng + ?Sized>(
    rng: &mut R,
) -> Result<(Triangle, Wedge, f64, Point, Point, Point), ExperimentError> {
    let t = random_triangle(rng);
    let w = Wedge::from_triangle(&t)?;
    let alpha = random_alpha(&w, rng);
    let (q, p, r) = sample_admissible(&w, alpha, rng)?;
    Ok((t, w, alpha, q, p, r))
}

fn check_soundness(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(4, "admissibility_soundness");
    let mut rng = rng_for(config, 4);
    let (dslack, rslack) = (config.tolerances.decrement_slack, config.tolerances.ratio_slack);
    let (mut max_excess, mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..config.samples.soundness_triples {
        let (t, w, alpha, q, p, r) = random_admissible(&mut rng)?;
        let mut pair = InscribedChainPair::initial(&t)?;
        let ins = pair.insert(0, q, p, r)?;
        max_excess = max_excess.max(ins.decrement - alpha);
        for x in split_ratios(&w, p, q, r) {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    c.measure("max_decrement_minus_alpha", max_excess)
        .measure("min_ratio", lo)
        .measure("max_ratio", hi)
        .tolerance("decrement_slack", dslack)
        .tolerance("ratio_slack", rslack);
    c.require(max_excess <= dslack, || format!("decrement exceeds alpha by {max_excess:e}"));
    c.require(lo >= 0.125 - rslack && hi <= 0.875 + rslack, || format!("ratios span [{lo}, {hi}]"));
    Ok(c)
}

fn check_segment_bound(
    config: &ExperimentConfig,
    table: &Arc<PrimePowerTable>,
    tally: &mut ContractTally,
) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(5, "segment_bound");
    let mut rng = rng_for(config, 5);
    let slack = config.tolerances.segment_slack;
    let mut failures = 0usize;
    for _ in 0..config.samples.segment_configs {
        let (t, _, _, q, p, r) = random_admissible(&mut rng)?;
        // the bound checker takes the apex as the third vertex
        if !segment_bound_check_with_slack(&t, p, q, r, slack)? {
            failures += 1;
        }
    }
    let rc = RunConfig {
        stream: stream_id(5, 1),
        intensity: config.intensity,
        mode: config.poisson,
        ..RunConfig::new(config.triangle, config.samples.segment_run_horizon, config.seed)
    };
    let summary = run_with_table(&rc, table.clone())?;
    tally.add(&summary.steps);
    let worst_child = summary
        .steps
        .iter()
        .map(|s| s.child_longest_side / s.parent_longest_side)
        .fold(0.0f64, f64::max);
    let split_failures = summary
        .steps
        .iter()
        .filter(|s| s.child_longest_side > SHRINK_FACTOR * s.parent_longest_side + slack)
        .count();
    c.measure("config_failures", failures as f64)
        .measure("split_failures", split_failures as f64)
        .measure("max_child_over_parent", worst_child)
        .tolerance("segment_slack", slack);
    c.require(failures == 0, || format!("{failures} configurations exceed 399/400 of the longest side"));
    c.require(split_failures == 0, || format!("{split_failures} splits shrink the longest side by less than 399/400"));
    Ok(c)
}

fn check_floor(
    config: &ExperimentConfig,
    table: &Arc<PrimePowerTable>,
    tally: &mut ContractTally,
) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(6, "affine_length_floor");
    let horizon = config.samples.floor_horizon;
    let floor = length_floor(horizon);
    let slack = config.tolerances.floor_slack;
    let runs: Vec<RunSummary> = (0..config.samples.floor_seeds as u64)
        .into_par_iter()
        .map(|k| {
            let rc = RunConfig {
                intensity: config.intensity,
                mode: config.poisson,
                ..RunConfig::new(config.triangle, horizon, config.seed.wrapping_add(k))
            };
            run_with_table(&rc, table.clone())
        })
        .collect::<Result<_, _>>()?;
    let mut worst = f64::INFINITY;
    for r in &runs {
        tally.add(&r.steps);
        worst = worst.min(r.ell_trajectory[horizon] / r.ell_trajectory[0]);
    }
    c.measure("min_ratio", worst).measure("floor", floor).tolerance("floor_slack", slack);
    c.require(worst >= floor - slack, || format!("ell_N / ell_1 = {worst} below {floor}"));
    Ok(c)
}

fn check_contract(config: &ExperimentConfig, tally: &ContractTally) -> CriterionResult {
    let mut c = CriterionResult::new(7, "decrement_contract");
    let (lo, hi) = (config.tolerances.nonneg_slack, config.tolerances.decrement_slack);
    c.measure("steps", tally.steps as f64)
        .measure("min_drop", tally.min_drop)
        .measure("max_drop_minus_a_n", tally.max_excess)
        .tolerance("nonneg_slack", lo)
        .tolerance("decrement_slack", hi);
    c.require(tally.steps > 0, || "no steps were checked".into());
    c.require(tally.min_drop >= -lo, || format!("affine length grew by {:e}", -tally.min_drop));
    c.require(tally.max_excess <= hi, || format!("decrement exceeds a_n by {:e}", tally.max_excess));
    c
}

fn check_miss(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(8, "miss_probability");
    let steps = &config.samples.miss_steps;
    let cfg = ExperimentConfig {
        trials: config.samples.miss_replays,
        horizon: steps.iter().copied().max().unwrap_or(1).max(1),
        ..config.clone()
    };
    let sigmas = config.tolerances.miss_sigmas;
    c.tolerance("sigmas", sigmas);
    for row in estimate_miss_rate(&cfg, steps)? {
        let z = row.z_score();
        c.measure(&format!("n{}_exact", row.n), row.exact_p)
            .measure(&format!("n{}_empirical", row.n), row.empirical)
            .measure(&format!("n{}_z", row.n), z);
        c.require(z <= sigmas, || format!("step {}: empirical {} vs exact {} ({z:.3} sigma)", row.n, row.empirical, row.exact_p));
    }
    Ok(c)
}

/// Theorem assemblies for trials `0..trials`, in trial order.
pub fn theorem_trials(
    config: &ExperimentConfig,
    trials: usize,
    horizon: usize,
    table: &Arc<PrimePowerTable>,
) -> Result<Vec<TheoremResult>, ExperimentError> {
    let results: Vec<TheoremResult> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let tc = TheoremConfig {
                center: config.circle.center,
                radius: config.circle.radius,
                wedges: config.wedges,
                horizon,
                seed: config.seed,
                trial,
                intensity: config.intensity,
                mode: config.poisson,
                offsets: config.offsets,
            };
            assemble_theorem_curve_with_table(&tc, table.clone())
        })
        .collect::<Result<_, _>>()?;
    Ok(results)
}

fn check_theorem(
    config: &ExperimentConfig,
    table: &Arc<PrimePowerTable>,
    tally: &mut ContractTally,
) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(9, "theorem_trend");
    let horizon = config.samples.theorem_horizon;
    let results = theorem_trials(config, config.samples.theorem_trials, horizon, table)?;
    for r in &results {
        for run in &r.runs {
            tally.add(&run.steps);
        }
    }
    let (early, late) = theorem_trend(&results, horizon);
    let nonconvex = results.iter().filter(|r| !r.strictly_convex).count();
    c.measure("early_mean_hits", early)
        .measure("late_mean_hits", late)
        .measure("nonconvex_trials", nonconvex as f64);
    c.require(late > early, || format!("late mean {late} does not exceed early mean {early}"));
    c.require(nonconvex == 0, || format!("{nonconvex} assembled curves are not strictly convex"));
    Ok(c)
}

/// Prime powers up to `limit` by marking the powers of each sieved prime.
fn prime_powers_upto(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut is_pp = vec![false; limit + 1];
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        for m in (p * p..=limit).step_by(p) {
            composite[m] = true;
        }
        let mut q = p;
        while q <= limit {
            is_pp[q] = true;
            q = match q.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    (2..=limit).filter(|&k| is_pp[k]).map(|k| k as u64).collect()
}

fn check_number_theory(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(10, "number_theory");
    let limit = config.samples.number_limit;
    let mut partition_failures = 0usize;
    for n in 1..=limit as u64 {
        if !verify_partition(n)? {
            partition_failures += 1;
        }
    }
    // enough room for the limit-th prime power
    let mut bound = limit.max(16);
    let oracle = loop {
        let v = prime_powers_upto(bound);
        if v.len() >= limit {
            break v;
        }
        bound *= 2;
    };
    let table = PrimePowerTable::with_terms(limit);
    let seq_mismatches = (1..=limit).filter(|&k| table.get(k).map(|q| q.value).ok() != Some(oracle[k - 1])).count();
    let mut weak = 0usize;
    for q in table.iter().filter(|q| q.value <= limit as u64) {
        let w = prime_power_intensity(q)?.w;
        if 2 * w <= q.value * q.value {
            weak += 1;
        }
    }
    c.measure("partition_failures", partition_failures as f64)
        .measure("sequence_mismatches", seq_mismatches as f64)
        .measure("intensity_bound_failures", weak as f64);
    c.require(partition_failures == 0, || format!("{partition_failures} partition identities fail"));
    c.require(seq_mismatches == 0, || format!("{seq_mismatches} sequence terms differ from the sieve"));
    c.require(weak == 0, || format!("{weak} prime powers have w_q <= q^2/2"));
    Ok(c)
}

/// Cell of `p` in the subdivision of triangle `t` into `m^2` equal-area triangles.
pub fn simplex_cell(t: &Triangle, p: Point, m: usize) -> Option<usize> {
    let d = doubled_area(t.a, t.b, t.c);
    // barycentric weights of b and c
    let lb = doubled_area(t.a, p, t.c) / d;
    let lc = doubled_area(t.a, t.b, p) / d;
    let (u, v) = (lb * m as f64, lc * m as f64);
    if !(u >= 0.0 && v >= 0.0) {
        return None;
    }
    let (i, j) = (u.floor() as usize, v.floor() as usize);
    let upper = (u - i as f64) + (v - j as f64) >= 1.0;
    if i + j + usize::from(upper) > m - 1 {
        return None;
    }
    Some(2 * (i * m + j) + usize::from(upper))
}

fn check_poisson(config: &ExperimentConfig) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(11, "poisson_sampler");
    let mut rng = rng_for(config, 11);
    let tol = &config.tolerances;
    c.tolerance("mean_sigmas", tol.poisson_sigmas)
        .tolerance("variance_rel", tol.poisson_var_rel)
        .tolerance("chi2_alpha", tol.chi2_alpha);
    let n = config.samples.poisson_draws;
    for &mu in &config.samples.poisson_means {
        let xs: Vec<f64> = (0..n).map(|_| poisson_count(mu, &mut rng).map(|k| k as f64)).collect::<Result<_, _>>()?;
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
        let z = (mean - mu).abs() / (mu / n as f64).sqrt();
        let rel = (var - mu).abs() / mu;
        c.measure(&format!("mean_{mu}_z"), z).measure(&format!("mean_{mu}_var_rel"), rel);
        c.require(z <= tol.poisson_sigmas, || format!("mean {mean} at {mu}: {z:.3} sigma"));
        c.require(rel <= tol.poisson_var_rel, || format!("variance {var} at {mu}"));
    }

    let t = config.triangle;
    let w = Wedge::from_triangle(&t)?;
    let m = config.samples.chi2_grid;
    let intensity = config.samples.chi2_points as f64 / w.plain_area();
    let batch = sample_in_wedges(intensity, &[w], &mut rng)?;
    let mut counts = vec![0u64; 2 * m * m];
    let mut outside = 0usize;
    for p in &batch.points {
        match simplex_cell(&t, *p, m) {
            Some(k) => counts[k] += 1,
            None => outside += 1,
        }
    }
    let cells = m * m;
    let expected = (batch.len() - outside) as f64 / cells as f64;
    let mut stat = 0.0;
    for i in 0..m {
        for j in 0..m - i {
            let mut add = |k: usize| stat += (counts[k] as f64 - expected).powi(2) / expected;
            add(2 * (i * m + j));
            if i + j + 1 < m {
                add(2 * (i * m + j) + 1);
            }
        }
    }
    let p_value = 1.0 - ChiSquared::new((cells - 1) as f64).expect("positive dof").cdf(stat);
    c.measure("chi2_statistic", stat).measure("chi2_p_value", p_value).measure("points_outside", outside as f64);
    c.require(outside == 0, || format!("{outside} points fell outside the triangle"));
    c.require(p_value >= tol.chi2_alpha, || format!("chi-square p-value {p_value:e}"));
    Ok(c)
}

fn check_determinism(config: &ExperimentConfig, table: &Arc<PrimePowerTable>) -> Result<CriterionResult, ExperimentError> {
    let mut c = CriterionResult::new(12, "determinism");
    let horizon = config.samples.determinism_horizon;
    let payload = || -> Result<(Vec<u8>, String, Vec<RunSummary>), ExperimentError> {
        let runs: Vec<RunSummary> = (0..2u64)
            .map(|trial| {
                let rc = RunConfig {
                    stream: stream_id(trial, 0),
                    intensity: config.intensity,
                    mode: config.poisson,
                    ..RunConfig::new(config.triangle, horizon, config.seed)
                };
                run_with_table(&rc, table.clone())
            })
            .collect::<Result<_, _>>()?;
        let rows: Vec<(u64, &[StepRecord])> = runs.iter().enumerate().map(|(i, r)| (i as u64, r.steps.as_slice())).collect();
        let csv = steps_to_csv(&rows)?;
        let stats: Vec<RunStats> = runs.iter().enumerate().map(|(i, r)| RunStats::from_summary(i as u64, r)).collect();
        Ok((csv, serde_json::to_string(&stats)?, runs))
    };
    let (csv_a, json_a, runs) = payload()?;
    let (csv_b, json_b, _) = payload()?;
    let reingested = ingest_csv(csv_a.as_slice())?;
    let reingest_exact = reingested.len() == runs.len()
        && reingested
            .iter()
            .zip(&runs)
            .all(|((t, steps), r)| RunStats::from_steps(*t, steps) == RunStats::from_summary(*t, r));
    c.measure("csv_identical", f64::from(u8::from(csv_a == csv_b)))
        .measure("json_identical", f64::from(u8::from(json_a == json_b)))
        .measure("reingest_exact", f64::from(u8::from(reingest_exact)));
    c.require(csv_a == csv_b, || "CSV payloads differ".into());
    c.require(json_a == json_b, || "JSON payloads differ".into());
    c.require(reingest_exact, || "re-ingested CSV does not reproduce the run statistics".into());
    Ok(c)
}

/// Runs every check. Check failures are recorded; infrastructure errors abort.
pub fn verify_lemma_suite(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    config.validate()?;
    let s = &config.samples;
    let terms = s.floor_horizon.max(s.segment_run_horizon).max(s.theorem_horizon).max(s.determinism_horizon);
    let table = Arc::new(PrimePowerTable::with_terms(terms));
    let mut tally = ContractTally::default();
    let mut criteria = Vec::with_capacity(12);
    let mut runtimes_ms = std::collections::BTreeMap::new();
    let mut timed = |id: u32, f: &mut dyn FnMut() -> Result<CriterionResult, ExperimentError>| {
        let start = Instant::now();
        let r = f();
        runtimes_ms.insert(id, start.elapsed().as_secs_f64() * 1e3);
        r
    };
    criteria.push(timed(1, &mut || check_amgm(config))?);
    criteria.push(timed(2, &mut || check_split_nonnegativity(config))?);
    criteria.push(timed(3, &mut || check_admissible_area(config))?);
    criteria.push(timed(4, &mut || check_soundness(config))?);
    criteria.push(timed(5, &mut || check_segment_bound(config, &table, &mut tally))?);
    criteria.push(timed(6, &mut || check_floor(config, &table, &mut tally))?);
    let miss = timed(8, &mut || check_miss(config))?;
    let theorem = timed(9, &mut || check_theorem(config, &table, &mut tally))?;
    criteria.push(timed(7, &mut || Ok(check_contract(config, &tally)))?);
    criteria.push(miss);
    criteria.push(theorem);
    criteria.push(timed(10, &mut || check_number_theory(config))?);
    criteria.push(timed(11, &mut || check_poisson(config))?);
    criteria.push(timed(12, &mut || check_determinism(config, &table))?);
    Ok(Report { seed: config.seed, criteria, runtimes_ms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_cells_partition() {
        let t = Triangle::new(Point::new(0.0, 0.0), Point::new(4.0, 1.0), Point::new(1.0, 3.0)).unwrap();
        let m = 5;
        let mut rng = SeededGenerator::new(3, 0);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..20_000 {
            let p = crate::sampler::sample_triangle(&t, &mut rng);
            seen.insert(simplex_cell(&t, p, m).unwrap());
        }
        assert_eq!(seen.len(), m * m);
        assert_eq!(simplex_cell(&t, Point::new(-1.0, -1.0), m), None);
    }

    #[test]
    fn prime_power_oracle_small() {
        assert_eq!(prime_powers_upto(20), vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19]);
    }
}
