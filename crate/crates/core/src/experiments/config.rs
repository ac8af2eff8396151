//! Experiment configuration: a JSON document plus `key=value` overrides.
//!
//! Overrides address fields by dotted path (`tolerances.area_sigmas=0`,
//! `circle.center.x=2.5`). The value is parsed as JSON when possible and as
//! a bare string otherwise, so `mode=sweep` and `mode="sweep"` are the same.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::construction::{IntensityPolicy, PoissonMode, StartOffsets};
use crate::error::ExperimentError;
use crate::geometry::{Point, Triangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Simulate,
    Theorem,
    Verify,
    Render,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Theorem => "theorem",
            Mode::Verify => "verify",
            Mode::Render => "render",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Default for Circle {
    fn default() -> Self {
        Self { center: Point::new(0.0, 0.0), radius: 1000.0 }
    }
}

/// Tolerances of the verification suite. A value of 0 makes the
/// statistical checks fail on any sampling noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// AM-GM identity residual, relative to `max(1, x, y, z)`.
    pub amgm_rel: f64,
    /// Lower slack on the normalized decrement of random splits.
    pub err_floor: f64,
    /// Binomial sigmas for the band-area Monte Carlo.
    pub area_sigmas: f64,
    /// Upper slack on the decrement of a band split.
    pub decrement_slack: f64,
    /// Slack on the `[1/8, 7/8]` ratio window.
    pub ratio_slack: f64,
    /// Slack on the 399/400 segment bound.
    pub segment_slack: f64,
    /// Slack on the affine-length floor.
    pub floor_slack: f64,
    /// Lower slack on per-step decrements.
    pub nonneg_slack: f64,
    /// Binomial sigmas for the miss-probability replays.
    pub miss_sigmas: f64,
    /// Sigmas for the Poisson count mean.
    pub poisson_sigmas: f64,
    /// Relative tolerance on the Poisson count variance.
    pub poisson_var_rel: f64,
    /// Significance level of the spatial chi-square test.
    pub chi2_alpha: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            amgm_rel: 1e-12,
            err_floor: 1e-12,
            area_sigmas: 3.0,
            decrement_slack: 1e-9,
            ratio_slack: 1e-12,
            segment_slack: 1e-12,
            floor_slack: 1e-9,
            nonneg_slack: 1e-12,
            miss_sigmas: 3.0,
            poisson_sigmas: 3.0,
            poisson_var_rel: 0.05,
            chi2_alpha: 1e-3,
        }
    }
}

/// Sample sizes of the verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub amgm_triples: usize,
    pub lemma_configs: usize,
    pub area_points: usize,
    pub area_ratios: Vec<f64>,
    pub soundness_triples: usize,
    pub segment_configs: usize,
    pub segment_run_horizon: usize,
    pub floor_seeds: usize,
    pub floor_horizon: usize,
    pub miss_replays: usize,
    pub miss_steps: Vec<usize>,
    pub theorem_trials: usize,
    pub theorem_horizon: usize,
    pub number_limit: usize,
    pub poisson_draws: usize,
    pub poisson_means: Vec<f64>,
    pub chi2_points: usize,
    pub chi2_grid: usize,
    pub determinism_horizon: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Self {
            amgm_triples: 100_000,
            lemma_configs: 100_000,
            area_points: 1_000_000,
            area_ratios: vec![0.01, 0.1, 1.0],
            soundness_triples: 100_000,
            segment_configs: 100_000,
            segment_run_horizon: 2000,
            floor_seeds: 20,
            floor_horizon: 5000,
            miss_replays: 2000,
            miss_steps: vec![1, 2, 3, 5, 20],
            theorem_trials: 50,
            theorem_horizon: 400,
            number_limit: 10_000,
            poisson_draws: 100_000,
            poisson_means: vec![0.5, 5.0, 50.0],
            chi2_points: 100_000,
            chi2_grid: 10,
            determinism_horizon: 300,
        }
    }
}

/// Rendering options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RenderOptions {
    /// Budget used to shade the admissible bands; `None` draws no bands.
    pub band_alpha: Option<f64>,
    /// Render this pair snapshot instead of running the construction.
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Root triangle of `simulate`, `render` and `sweep`.
    pub triangle: Triangle,
    /// Circle of the theorem assembly.
    pub circle: Circle,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    /// Number of circle wedges `W`.
    pub wedges: usize,
    pub offsets: StartOffsets,
    pub intensity: IntensityPolicy,
    pub poisson: PoissonMode,
    pub out: PathBuf,
    pub tolerances: Tolerances,
    pub samples: Samples,
    pub render: RenderOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Simulate,
            triangle: Triangle::canonical(),
            circle: Circle::default(),
            horizon: 400,
            trials: 1,
            seed: 1,
            wedges: 8,
            offsets: StartOffsets::FromStart,
            intensity: IntensityPolicy::PrimePower,
            poisson: PoissonMode::default(),
            out: PathBuf::from("out"),
            tolerances: Tolerances::default(),
            samples: Samples::default(),
            render: RenderOptions::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.triangle.validate().map_err(|e| config_err(format!("triangle: {e}")))?;
        if !(self.circle.radius.is_finite() && self.circle.radius > 0.0) || !self.circle.center.is_finite() {
            return Err(config_err("circle radius must be positive and the center finite"));
        }
        for (name, v) in [("horizon", self.horizon), ("trials", self.trials), ("wedges", self.wedges)] {
            if v == 0 {
                return Err(config_err(format!("{name} must be positive")));
            }
        }
        if self.wedges > 60 {
            return Err(config_err("wedges must be at most 60"));
        }
        if let StartOffsets::Pilot { epsilon0 } = self.offsets {
            if !(epsilon0 > 0.0 && epsilon0 < 1.0) {
                return Err(config_err("offsets epsilon0 must lie in (0, 1)"));
            }
        }
        match self.intensity {
            IntensityPolicy::PrimePower => {}
            IntensityPolicy::Fixed(v) | IntensityPolicy::Scaled(v) => {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(config_err("intensity value must be finite and nonnegative"));
                }
            }
        }
        if let PoissonMode::Auto { full_limit } = self.poisson {
            if !(full_limit >= 0.0) {
                return Err(config_err("poisson full_limit must be nonnegative"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("amgm_rel", t.amgm_rel),
            ("err_floor", t.err_floor),
            ("area_sigmas", t.area_sigmas),
            ("decrement_slack", t.decrement_slack),
            ("ratio_slack", t.ratio_slack),
            ("segment_slack", t.segment_slack),
            ("floor_slack", t.floor_slack),
            ("nonneg_slack", t.nonneg_slack),
            ("miss_sigmas", t.miss_sigmas),
            ("poisson_sigmas", t.poisson_sigmas),
            ("poisson_var_rel", t.poisson_var_rel),
            ("chi2_alpha", t.chi2_alpha),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(config_err(format!("tolerance {name} must be finite and nonnegative")));
            }
        }
        let s = &self.samples;
        for (name, v) in [
            ("amgm_triples", s.amgm_triples),
            ("lemma_configs", s.lemma_configs),
            ("area_points", s.area_points),
            ("soundness_triples", s.soundness_triples),
            ("segment_configs", s.segment_configs),
            ("segment_run_horizon", s.segment_run_horizon),
            ("floor_seeds", s.floor_seeds),
            ("floor_horizon", s.floor_horizon),
            ("miss_replays", s.miss_replays),
            ("theorem_trials", s.theorem_trials),
            ("theorem_horizon", s.theorem_horizon),
            ("number_limit", s.number_limit),
            ("poisson_draws", s.poisson_draws),
            ("chi2_points", s.chi2_points),
            ("determinism_horizon", s.determinism_horizon),
        ] {
            if v == 0 {
                return Err(config_err(format!("samples.{name} must be positive")));
            }
        }
        if s.chi2_grid < 2 {
            return Err(config_err("samples.chi2_grid must be at least 2"));
        }
        if s.area_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(config_err("samples.area_ratios must be positive"));
        }
        if s.poisson_means.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(config_err("samples.poisson_means must be positive"));
        }
        if s.miss_steps.contains(&0) {
            return Err(config_err("samples.miss_steps are 1-based"));
        }
        if let Some(a) = self.render.band_alpha {
            if !(a.is_finite() && a > 0.0) {
                return Err(config_err("render.band_alpha must be positive"));
            }
        }
        Ok(())
    }

    /// Applies one `key=value` override and revalidates.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ExperimentError> {
        let (key, value) = parse_override(spec)?;
        let mut doc = serde_json::to_value(&*self)?;
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = match slot {
                Value::Object(map) => map
                    .get_mut(part)
                    .ok_or_else(|| config_err(format!("unknown config key `{key}`")))?,
                _ => return Err(config_err(format!("`{key}` does not name a config field"))),
            };
        }
        *slot = value;
        let updated: Self = serde_json::from_value(doc).map_err(|e| config_err(format!("override `{key}`: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }
}

/// Splits `key=value` and parses the value as JSON, falling back to a string.
pub fn parse_override(spec: &str) -> Result<(String, Value), ExperimentError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    let valid = !key.is_empty()
        && key.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
    if !valid {
        return Err(config_err(format!("invalid override key `{key}`")));
    }
    let raw = raw.trim();
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json_string(), cfg.to_json_string());
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg = ExperimentConfig::from_json_str(r#"{"mode": "sweep", "horizon": 3}"#).unwrap();
        assert_eq!(cfg.mode, Mode::Sweep);
        assert_eq!(cfg.horizon, 3);
        assert_eq!(cfg.trials, 1);
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            r#"{"horizon": 0}"#,
            r#"{"bogus": 1}"#,
            r#"{"circle": {"center": {"x": 0, "y": 0}, "radius": -1}}"#,
            r#"{"triangle": {"a": {"x": 0, "y": 0}, "b": {"x": 1, "y": 1}, "c": {"x": 2, "y": 2}}}"#,
            r#"{"tolerances": {"area_sigmas": -1}}"#,
            "not json",
        ] {
            assert!(ExperimentConfig::from_json_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn overrides() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_override("mode=sweep").unwrap();
        cfg.apply_override("horizon=12").unwrap();
        cfg.apply_override("tolerances.area_sigmas=0").unwrap();
        cfg.apply_override("circle.center.x=2.5").unwrap();
        cfg.apply_override("offsets={\"kind\":\"pilot\",\"epsilon0\":0.1}").unwrap();
        cfg.apply_override("samples.miss_steps=[1,4]").unwrap();
        assert_eq!(cfg.mode, Mode::Sweep);
        assert_eq!(cfg.horizon, 12);
        assert_eq!(cfg.tolerances.area_sigmas, 0.0);
        assert_eq!(cfg.circle.center.x, 2.5);
        assert_eq!(cfg.offsets, StartOffsets::Pilot { epsilon0: 0.1 });
        assert_eq!(cfg.samples.miss_steps, vec![1, 4]);

        let before = cfg.clone();
        for bad in ["horizon", "=3", "nope=1", "horizon=-1", "horizon=0", "mode=fly", "horizon.x=1", "a..b=1"] {
            assert!(cfg.apply_override(bad).is_err(), "{bad}");
            assert_eq!(cfg, before);
        }
    }
}
