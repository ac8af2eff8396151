//! Empirical miss rates from frozen construction states.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{Construction, RunConfig};
use crate::error::ExperimentError;
use crate::experiments::config::ExperimentConfig;
use crate::pseudolattice::PrimePowerTable;
use crate::sampler::stream_id;

/// Stream slot of the trajectory leading to the frozen states; replays use `1 + k`.
const TRAJECTORY_SLOT: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissRow {
    pub n: usize,
    pub intensity: f64,
    pub exact_s_n: f64,
    pub exact_p: f64,
    pub replays: usize,
    pub misses: usize,
    pub empirical: f64,
    /// Binomial standard deviation `sqrt(P (1 - P) / replays)` at the exact `P`.
    pub sigma: f64,
}

impl MissRow {
    /// Distance from the exact probability in units of `sigma`.
    /// A zero sigma gives 0 on exact agreement and infinity otherwise.
    pub fn z_score(&self) -> f64 {
        let d = (self.empirical - self.exact_p).abs();
        if self.sigma > 0.0 {
            d / self.sigma
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// For each `n`, freezes the trial-0 trajectory of `config.triangle` just
/// before step `n` and replays that step `config.trials` times on fresh
/// streams, counting steps without an admissible Poisson point.
pub fn estimate_miss_rate(config: &ExperimentConfig, n_list: &[usize]) -> Result<Vec<MissRow>, ExperimentError> {
    let max_n = n_list.iter().copied().max().unwrap_or(0);
    if n_list.contains(&0) {
        return Err(ExperimentError::Config("step indices are 1-based".into()));
    }
    if max_n > config.horizon {
        return Err(ExperimentError::Config(format!("step {max_n} is beyond the horizon {}", config.horizon)));
    }
    let table = Arc::new(PrimePowerTable::with_terms(max_n.max(1)));
    let run_cfg = RunConfig {
        stream: stream_id(0, TRAJECTORY_SLOT),
        intensity: config.intensity,
        mode: config.poisson,
        ..RunConfig::new(config.triangle, max_n.max(1), config.seed)
    };
    let mut frozen = Construction::new(&run_cfg, table)?;
    let mut sorted: Vec<usize> = n_list.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        while frozen.step_index() < n {
            frozen.step()?;
        }
        let (intensity, _, exact_s_n) = frozen.step_parameters()?;
        let exact_p = (-intensity * exact_s_n).exp();
        let outcomes: Vec<bool> = (0..config.trials)
            .into_par_iter()
            .map(|k| {
                let mut c = frozen.clone();
                c.reseed(config.seed, stream_id(n as u64, 1 + k as u64));
                c.step().map(|r| !r.hit)
            })
            .collect::<Result<_, _>>()?;
        let misses = outcomes.iter().filter(|&&m| m).count();
        let replays = config.trials;
        rows.push(MissRow {
            n,
            intensity,
            exact_s_n,
            exact_p,
            replays,
            misses,
            empirical: misses as f64 / replays as f64,
            sigma: (exact_p * (1.0 - exact_p) / replays as f64).sqrt(),
        });
    }
    // report in the caller's order
    Ok(n_list.iter().map(|n| rows.iter().find(|r| r.n == *n).cloned().expect("row computed")).collect())
}
