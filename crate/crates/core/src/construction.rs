//! The inductive construction.
//!
//! At step `n` the pair has `n` wedges. A Poisson batch of intensity
//! `w_{q_n}` is drawn over the wedges; if any point is `a_n`-admissible one
//! of them is inserted (a hit), otherwise an admissible point is drawn from
//! the bands directly (a miss). Given the state, a miss happens with
//! probability `exp(-w_{q_n} * s_n)` where `s_n` is the total band area.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::admissible::{admissible_area, AdmissibleBand};
use crate::chain::{InscribedChainPair, PairRecord};
use crate::error::ConstructionError;
use crate::geometry::{is_strictly_convex, Point, Triangle, SHRINK_FACTOR};
use crate::pseudolattice::{prime_power_intensity, PrimePowerTable};
use crate::sampler::{poisson_count, sample_in_wedges, stream_id, CumulativeTable, SeededGenerator};

/// Slack on the upper decrement bound.
pub const DECREMENT_SLACK: f64 = 1e-9;
/// Slack on the lower decrement bound.
pub const NONNEG_SLACK: f64 = 1e-12;

/// Decrement budget `a_n`: `ell / 2` for `n <= 2`, else `2 ell / (n ln^(3/2) n)`.
pub fn a_schedule(n: usize, ell: f64) -> f64 {
    if ell <= 0.0 {
        return 0.0;
    }
    if n <= 2 {
        ell / 2.0
    } else {
        let nf = n as f64;
        2.0 * ell / (nf * nf.ln().powf(1.5))
    }
}

/// Budget ratio `a_k / ell_k`.
pub fn budget_ratio(k: usize) -> f64 {
    a_schedule(k, 1.0)
}

/// Lower bound on `ell_n / ell_1`: `prod_{k=1}^{n-1} (1 - a_k / ell_k)`.
pub fn length_floor(n: usize) -> f64 {
    (1..n).map(|k| 1.0 - budget_ratio(k)).product()
}

/// Where the per-step intensity comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum IntensityPolicy {
    /// `w_{q_n}` from the prime-power schedule.
    #[default]
    PrimePower,
    /// Constant intensity (test hook).
    Fixed(f64),
    /// `w_{q_n}` multiplied by a constant.
    Scaled(f64),
}

impl IntensityPolicy {
    fn resolve(&self, w: u64) -> f64 {
        match *self {
            IntensityPolicy::PrimePower => w as f64,
            IntensityPolicy::Fixed(v) => v,
            IntensityPolicy::Scaled(k) => k * w as f64,
        }
    }
}

/// How the Poisson layer is realized.
///
/// `Full` materializes every point of the batch and filters by admissibility.
/// `Restricted` draws the admissible and non-admissible counts as independent
/// Poisson variables over the two disjoint regions and only materializes the
/// inserted point. The two have the same law for `(count, admissible count, Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoissonMode {
    Full,
    Restricted,
    /// `Full` while the expected batch size stays below `full_limit`.
    Auto { full_limit: f64 },
}

impl Default for PoissonMode {
    fn default() -> Self {
        PoissonMode::Auto { full_limit: 20_000.0 }
    }
}

/// One step of a run. Flat so it maps to one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    /// Prime power `q_n`.
    pub q: u64,
    /// Prime base of `q_n`.
    pub p: u64,
    /// Exact intensity `w_{q_n}`.
    pub w: u64,
    /// Intensity actually used (differs from `w` under test policies).
    pub intensity: f64,
    pub a_n: f64,
    pub poisson_count: u64,
    pub admissible_count: u64,
    pub hit: bool,
    pub wedge: usize,
    pub decrement: f64,
    pub exact_s_n: f64,
    pub miss_probability: f64,
    pub ell_before: f64,
    pub ell_after: f64,
    pub parent_longest_side: f64,
    pub child_longest_side: f64,
}

/// Inputs of a single construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub root: Triangle,
    pub horizon: usize,
    pub seed: u64,
    pub stream: u64,
    #[serde(default)]
    pub intensity: IntensityPolicy,
    #[serde(default)]
    pub mode: PoissonMode,
    /// Run the full pair validation every this many steps (0 disables).
    #[serde(default)]
    pub validate_every: usize,
}

impl RunConfig {
    pub fn new(root: Triangle, horizon: usize, seed: u64) -> Self {
        Self {
            root,
            horizon,
            seed,
            stream: 0,
            intensity: IntensityPolicy::default(),
            mode: PoissonMode::default(),
            validate_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub stream: u64,
    pub steps: Vec<StepRecord>,
    pub final_pair: PairRecord,
    /// Hits keyed by prime power `q_n`.
    pub hit_count: BTreeMap<u64, u64>,
    /// `ell_1, ..., ell_{N+1}`.
    pub ell_trajectory: Vec<f64>,
}

impl RunSummary {
    pub fn hits(&self) -> usize {
        self.steps.iter().filter(|s| s.hit).count()
    }
}

/// Mutable state of one construction: the pair, the next step index, and the generator.
#[derive(Debug, Clone)]
pub struct Construction {
    pair: InscribedChainPair,
    n: usize,
    table: Arc<PrimePowerTable>,
    intensity: IntensityPolicy,
    mode: PoissonMode,
    rng: SeededGenerator,
}

impl Construction {
    pub fn new(config: &RunConfig, table: Arc<PrimePowerTable>) -> Result<Self, ConstructionError> {
        let pair = InscribedChainPair::initial(&config.root).map_err(|source| ConstructionError::Chain { step: 0, source })?;
        Ok(Self {
            pair,
            n: 1,
            table,
            intensity: config.intensity,
            mode: config.mode,
            rng: SeededGenerator::new(config.seed, config.stream),
        })
    }

    pub fn pair(&self) -> &InscribedChainPair {
        &self.pair
    }

    /// Index of the next step.
    pub fn step_index(&self) -> usize {
        self.n
    }

    pub fn set_intensity(&mut self, policy: IntensityPolicy) {
        self.intensity = policy;
    }

    pub fn set_mode(&mut self, mode: PoissonMode) {
        self.mode = mode;
    }

    /// Swaps the generator, e.g. to replay a frozen state on a fresh stream.
    pub fn reseed(&mut self, seed: u64, stream: u64) {
        self.rng = SeededGenerator::new(seed, stream);
    }

    fn band(&self, i: usize, a_n: f64, step: usize) -> Result<AdmissibleBand, ConstructionError> {
        AdmissibleBand::new(i, &self.pair.wedges()[i], a_n).map_err(|source| ConstructionError::Admissible { step, source })
    }

    /// Intensity, budget and exact admissible area for the upcoming step.
    pub fn step_parameters(&self) -> Result<(f64, f64, f64), ConstructionError> {
        let q = self.table.get(self.n)?;
        let w = prime_power_intensity(&q)?;
        let a_n = a_schedule(self.n, self.pair.ell());
        let s: f64 = self.pair.wedges().iter().map(|w| admissible_area(w, a_n)).sum();
        Ok((self.intensity.resolve(w.w), a_n, s))
    }

    /// Advances by one step.
    pub fn step(&mut self) -> Result<StepRecord, ConstructionError> {
        let step = self.n;
        let q = self.table.get(step)?;
        let w = prime_power_intensity(&q)?;
        let intensity = self.intensity.resolve(w.w);
        let ell_before = self.pair.ell();
        let a_n = a_schedule(step, ell_before);
        if !(a_n > 0.0) {
            return Err(ConstructionError::Invariant { step, detail: format!("budget a_n = {a_n}") });
        }
        let band_table = CumulativeTable::new(self.pair.wedges().iter().map(|w| admissible_area(w, a_n)));
        let exact_s_n = band_table.total();
        let sampler_err = |source| ConstructionError::Sampler { step, source };
        let adm_err = |source| ConstructionError::Admissible { step, source };

        let full = match self.mode {
            PoissonMode::Full => true,
            PoissonMode::Restricted => false,
            PoissonMode::Auto { full_limit } => intensity * self.pair.gap_area() <= full_limit,
        };

        let (poisson_count_total, admissible_count, hit_choice) = if full {
            let batch = sample_in_wedges(intensity, self.pair.wedges(), &mut self.rng).map_err(sampler_err)?;
            // bands are built only for wedges that received points
            let mut bands: Vec<Option<AdmissibleBand>> = vec![None; self.pair.wedges().len()];
            let mut candidates: Vec<(usize, Point, Point, Point)> = Vec::new();
            for (&pt, &i) in batch.points.iter().zip(&batch.wedge_of) {
                if bands[i].is_none() {
                    bands[i] = Some(self.band(i, a_n, step)?);
                }
                if let Some((p, r)) = bands[i].as_ref().and_then(|b| b.test(pt)) {
                    candidates.push((i, pt, p, r));
                }
            }
            let choice = if candidates.is_empty() {
                None
            } else {
                Some(candidates[self.rng.random_range(0..candidates.len())])
            };
            (batch.len() as u64, candidates.len() as u64, choice)
        } else {
            let inside = poisson_count(intensity * exact_s_n, &mut self.rng).map_err(sampler_err)?;
            let outside_area = (self.pair.gap_area() - exact_s_n).max(0.0);
            let outside = poisson_count(intensity * outside_area, &mut self.rng).map_err(sampler_err)?;
            let choice = if inside > 0 {
                let i = band_table.pick(&mut self.rng).ok_or_else(|| ConstructionError::Invariant {
                    step,
                    detail: "admissible region has zero area".into(),
                })?;
                let (qq, p, r) = self.band(i, a_n, step)?.sample(&mut self.rng).map_err(adm_err)?;
                Some((i, qq, p, r))
            } else {
                None
            };
            (inside + outside, inside, choice)
        };

        let hit = hit_choice.is_some();
        let (wedge, qq, p, r) = match hit_choice {
            Some(c) => c,
            None => {
                let i = band_table.pick(&mut self.rng).ok_or_else(|| ConstructionError::Invariant {
                    step,
                    detail: "admissible region has zero area".into(),
                })?;
                let (qq, p, r) = self.band(i, a_n, step)?.sample(&mut self.rng).map_err(adm_err)?;
                (i, qq, p, r)
            }
        };

        let ins = self.pair.insert(wedge, qq, p, r).map_err(|source| ConstructionError::Chain { step, source })?;
        if !(ins.decrement >= -NONNEG_SLACK && ins.decrement <= a_n + DECREMENT_SLACK) {
            return Err(ConstructionError::Invariant {
                step,
                detail: format!("decrement {:e} outside [0, a_n = {:e}]", ins.decrement, a_n),
            });
        }
        self.n += 1;
        Ok(StepRecord {
            n: step,
            q: q.value,
            p: q.base,
            w: w.w,
            intensity,
            a_n,
            poisson_count: poisson_count_total,
            admissible_count,
            hit,
            wedge,
            decrement: ins.decrement,
            exact_s_n,
            miss_probability: (-intensity * exact_s_n).exp(),
            ell_before,
            ell_after: self.pair.ell(),
            parent_longest_side: ins.parent.longest_side(),
            child_longest_side: ins.children[0].longest_side().max(ins.children[1].longest_side()),
        })
    }
}

/// Executes steps `1..=horizon`.
pub fn run(config: &RunConfig) -> Result<RunSummary, ConstructionError> {
    let table = Arc::new(PrimePowerTable::with_terms(config.horizon.max(1)));
    run_with_table(config, table)
}

pub fn run_with_table(config: &RunConfig, table: Arc<PrimePowerTable>) -> Result<RunSummary, ConstructionError> {
    if config.horizon == 0 {
        return Err(ConstructionError::Config("horizon must be at least 1".into()));
    }
    if table.len() < config.horizon {
        return Err(ConstructionError::Config(format!(
            "prime power table has {} terms, horizon is {}",
            table.len(),
            config.horizon
        )));
    }
    let mut c = Construction::new(config, table)?;
    let mut steps = Vec::with_capacity(config.horizon);
    let mut ell_trajectory = Vec::with_capacity(config.horizon + 1);
    let mut hit_count = BTreeMap::new();
    ell_trajectory.push(c.pair().ell());
    for _ in 0..config.horizon {
        let rec = c.step()?;
        if config.validate_every > 0 && rec.n % config.validate_every == 0 {
            c.pair().validate().map_err(|source| ConstructionError::Chain { step: rec.n, source })?;
        }
        if rec.hit {
            *hit_count.entry(rec.q).or_insert(0) += 1;
        }
        ell_trajectory.push(rec.ell_after);
        steps.push(rec);
    }
    Ok(RunSummary {
        seed: config.seed,
        stream: config.stream,
        steps,
        final_pair: c.pair().to_record(),
        hit_count,
        ell_trajectory,
    })
}

/// Every recorded split obeys the 399/400 longest-side bound.
pub fn shrinkage_holds(summary: &RunSummary) -> bool {
    summary
        .steps
        .iter()
        .all(|s| s.child_longest_side <= SHRINK_FACTOR * s.parent_longest_side + 1e-12)
}

/// How per-wedge start offsets are chosen in the theorem assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartOffsets {
    /// Every wedge counts from step 1.
    #[default]
    FromStart,
    /// `N_i` is the first step whose remaining miss-probability tail, taken
    /// from a pilot run, is below `epsilon0 / 2^i`.
    Pilot { epsilon0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConfig {
    pub center: Point,
    pub radius: f64,
    pub wedges: usize,
    pub horizon: usize,
    pub seed: u64,
    pub trial: u64,
    #[serde(default)]
    pub intensity: IntensityPolicy,
    #[serde(default)]
    pub mode: PoissonMode,
    #[serde(default)]
    pub offsets: StartOffsets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremResult {
    pub triangles: Vec<Triangle>,
    pub polyline: Vec<Point>,
    pub strictly_convex: bool,
    /// Entry `n - 1` counts the wedges whose step `n` was a hit.
    pub per_n_hits: Vec<u32>,
    /// Start offset per wedge (`None` when the pilot tail never drops low enough).
    pub offsets: Vec<Option<usize>>,
    /// Whether every step from the offset on was a hit.
    pub wedge_success: Vec<bool>,
    pub runs: Vec<RunSummary>,
}

/// Angles `theta_i = pi / 2^(i+1)`, `i = 1..=count+1`, decreasing to 0.
pub fn circle_angles(count: usize) -> Vec<f64> {
    (1..=count + 1).map(|i| PI / 2f64.powi(i as i32 + 1)).collect()
}

/// Tangent-chord triangles `(A_i, A_{i+1}, apex)` along the circle.
pub fn circle_wedges(center: Point, radius: f64, count: usize) -> Result<Vec<Triangle>, ConstructionError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ConstructionError::Config(format!("radius must be positive, got {radius}")));
    }
    let angles = circle_angles(count);
    angles
        .windows(2)
        .map(|th| {
            let (t0, t1) = (th[0], th[1]);
            let at = |t: f64| center + Point::new(t.cos(), t.sin()) * radius;
            let mid = (t0 + t1) / 2.0;
            let half = (t0 - t1) / 2.0;
            let apex = center + Point::new(mid.cos(), mid.sin()) * (radius / half.cos());
            Triangle::new(at(t0), at(t1), apex).map_err(|e| ConstructionError::Config(e.to_string()))
        })
        .collect()
}

fn offset_from_pilot(pilot: &RunSummary, target: f64) -> Option<usize> {
    // tail[k] = sum of miss probabilities from step k+1 to the horizon
    let probs: Vec<f64> = pilot.steps.iter().map(|s| s.miss_probability).collect();
    let mut tail = 0.0;
    let mut best = None;
    for k in (0..probs.len()).rev() {
        tail += probs[k];
        if tail < target {
            best = Some(k + 1);
        } else {
            break;
        }
    }
    best
}

/// Runs one construction per circle wedge and glues the inner chains.
pub fn assemble_theorem_curve(config: &TheoremConfig) -> Result<TheoremResult, ConstructionError> {
    let table = Arc::new(PrimePowerTable::with_terms(config.horizon.max(1)));
    assemble_theorem_curve_with_table(config, table)
}

pub fn assemble_theorem_curve_with_table(
    config: &TheoremConfig,
    table: Arc<PrimePowerTable>,
) -> Result<TheoremResult, ConstructionError> {
    if config.wedges == 0 {
        return Err(ConstructionError::Config("at least one wedge is required".into()));
    }
    let triangles = circle_wedges(config.center, config.radius, config.wedges)?;
    let mut runs = Vec::with_capacity(triangles.len());
    let mut offsets = Vec::with_capacity(triangles.len());
    for (i, tri) in triangles.iter().enumerate() {
        let rc = RunConfig {
            root: *tri,
            horizon: config.horizon,
            seed: config.seed,
            stream: stream_id(config.trial, i as u64),
            intensity: config.intensity,
            mode: config.mode,
            validate_every: 0,
        };
        let wrap = |e| ConstructionError::Wedge { wedge: i, source: Box::new(e) };
        let summary = run_with_table(&rc, table.clone()).map_err(wrap)?;
        let offset = match config.offsets {
            StartOffsets::FromStart => Some(1),
            StartOffsets::Pilot { epsilon0 } => {
                // pilot streams live above every trial index
                let pilot_cfg = RunConfig { stream: stream_id(u32::MAX as u64, i as u64), ..rc };
                let pilot = run_with_table(&pilot_cfg, table.clone()).map_err(wrap)?;
                offset_from_pilot(&pilot, epsilon0 / 2f64.powi(i as i32 + 1))
            }
        };
        offsets.push(offset);
        runs.push(summary);
    }

    let mut per_n_hits = vec![0u32; config.horizon];
    for r in &runs {
        for s in &r.steps {
            if s.hit {
                per_n_hits[s.n - 1] += 1;
            }
        }
    }
    let wedge_success = runs
        .iter()
        .zip(&offsets)
        .map(|(r, off)| off.is_some_and(|o| r.steps.iter().filter(|s| s.n >= o).all(|s| s.hit)))
        .collect();

    let mut polyline: Vec<Point> = Vec::new();
    for r in &runs {
        let inner = &r.final_pair.inner;
        let skip = usize::from(!polyline.is_empty());
        polyline.extend_from_slice(&inner[skip..]);
    }
    let strictly_convex = polyline.len() < 3 || is_strictly_convex(&polyline);
    Ok(TheoremResult { triangles, polyline, strictly_convex, per_n_hits, offsets, wedge_success, runs })
}

/// Lifetime of one wedge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeLife {
    /// First step at which the wedge exists.
    pub born: usize,
    pub split: Option<usize>,
    /// Steps the wedge was present without being split, counting the split step.
    pub age: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCensus {
    pub horizon: usize,
    pub wedges: Vec<WedgeLife>,
    pub splits: usize,
    pub alive: usize,
    pub max_age: usize,
    pub age_histogram: BTreeMap<usize, usize>,
    /// Fraction of all wedges whose age exceeds `horizon / 2`.
    pub fraction_older_than_half: f64,
}

/// Reconstructs every wedge's lifetime from the chosen wedge indices.
pub fn wedge_split_census(summary: &RunSummary) -> SplitCensus {
    let horizon = summary.steps.len();
    let mut born: Vec<usize> = vec![1];
    let mut lives = Vec::new();
    for s in &summary.steps {
        let b = born[s.wedge];
        lives.push(WedgeLife { born: b, split: Some(s.n), age: s.n + 1 - b });
        born.splice(s.wedge..=s.wedge, [s.n + 1, s.n + 1]);
    }
    let splits = lives.len();
    let alive = born.len();
    for b in born {
        lives.push(WedgeLife { born: b, split: None, age: (horizon + 1).saturating_sub(b) });
    }
    let mut age_histogram = BTreeMap::new();
    for l in &lives {
        *age_histogram.entry(l.age).or_insert(0) += 1;
    }
    let max_age = lives.iter().map(|l| l.age).max().unwrap_or(0);
    let old = lives.iter().filter(|l| 2 * l.age > horizon).count();
    SplitCensus {
        horizon,
        fraction_older_than_half: old as f64 / lives.len().max(1) as f64,
        wedges: lives,
        splits,
        alive,
        max_age,
        age_histogram,
    }
}
