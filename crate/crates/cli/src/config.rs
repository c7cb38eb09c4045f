//! Experiment configuration schema: JSON in, validated core types out.

use anyhow::{bail, Context, Result};
use fracblow_core::{CoefficientFn, InitialData, SimControl, SystemParams};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Mode {
    Kernel,
    Criterion,
    Ode,
    Simulate,
    Sweep,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::Kernel => "kernel",
            Mode::Criterion => "criterion",
            Mode::Ode => "ode",
            Mode::Simulate => "simulate",
            Mode::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

/// Top-level config. Each mode reads its own section; `system` is shared.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<CriterionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("malformed config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn system(&self) -> Result<&SystemConfig> {
        self.system
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config field 'system' is required for this mode"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub dim: u32,
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub g: (CoefficientFn, CoefficientFn),
    pub h: (CoefficientFn, CoefficientFn),
}

impl SystemConfig {
    pub fn to_params(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.dim,
            self.alpha,
            self.beta,
            self.g.clone(),
            self.h.clone(),
        )
        .map_err(|e| anyhow::anyhow!("invalid 'system' section: {e}"))
    }
}

fn default_halfwidth() -> f64 {
    20.0
}
fn default_points() -> usize {
    1024
}
fn default_quad_tol() -> f64 {
    1e-8
}
fn default_max_tail() -> f64 {
    0.3
}
fn default_times() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub alpha: f64,
    pub dim: u32,
    #[serde(default = "default_halfwidth")]
    pub grid_halfwidth: f64,
    #[serde(default = "default_points")]
    pub grid_points: usize,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    /// Times at which to evaluate.
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Evaluation points (each of length `dim`).
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Also compute grid mass + tail mass on the configured grid.
    #[serde(default)]
    pub grid_mass: bool,
    #[serde(default = "default_max_tail")]
    pub max_tail: f64,
    /// Run the invariant property suite (normalization, scaling, monotone
    /// comparison, product bound) and report the worst deviations.
    #[serde(default)]
    pub property_suite: bool,
}

fn default_t_start() -> f64 {
    1.0
}
fn default_horizon() -> f64 {
    4096.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionConfig {
    #[serde(default = "default_t_start")]
    pub t_start: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        CriterionConfig { t_start: default_t_start(), horizon: default_horizon() }
    }
}

fn default_k() -> f64 {
    1.0
}
fn default_ode_horizon() -> f64 {
    10.0
}
fn default_envelope_c() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeConfig {
    #[serde(default = "default_k")]
    pub k: f64,
    pub t0: f64,
    #[serde(default = "default_ode_horizon")]
    pub horizon: f64,
    /// Envelope constant c for the closed-form lower bound.
    #[serde(default = "default_envelope_c")]
    pub envelope_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub phi: (InitialData, InitialData),
    #[serde(default = "default_halfwidth")]
    pub box_halfwidth: f64,
    #[serde(default = "default_points")]
    pub resolution: usize,
    #[serde(default)]
    pub control: SimControlConfig,
}

/// Mirror of `SimControl` with per-field defaults so configs can override
/// only what they need.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimControlConfig {
    pub horizon: f64,
    pub sup_threshold: f64,
    pub dt_init: f64,
    pub dt_max: f64,
    pub dt_floor: f64,
    pub growth_cap: f64,
    pub record_moments: bool,
    pub moment_max_tail: f64,
}

impl Default for SimControlConfig {
    fn default() -> Self {
        let c = SimControl::default();
        SimControlConfig {
            horizon: c.horizon,
            sup_threshold: c.sup_threshold,
            dt_init: c.dt_init,
            dt_max: c.dt_max,
            dt_floor: c.dt_floor,
            growth_cap: c.growth_cap,
            record_moments: c.record_moments,
            moment_max_tail: c.moment_max_tail,
        }
    }
}

impl SimControlConfig {
    pub fn to_control(&self) -> SimControl {
        SimControl {
            horizon: self.horizon,
            sup_threshold: self.sup_threshold,
            dt_init: self.dt_init,
            dt_max: self.dt_max,
            dt_floor: self.dt_floor,
            growth_cap: self.growth_cap,
            record_moments: self.record_moments,
            moment_max_tail: self.moment_max_tail,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RangeConfig {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            bail!("range count must be >= 1 (empty range)");
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            bail!("range needs finite min <= max, got [{}, {}]", self.min, self.max);
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.min + i as f64 * step).collect())
    }
}

fn default_dims() -> Vec<u32> {
    vec![1, 2, 3, 4]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub beta1: RangeConfig,
    pub beta2: RangeConfig,
    #[serde(default = "default_dims")]
    pub dims: Vec<u32>,
    /// Also run a short simulation per tuple (d <= 2 only) and record the
    /// agreement flag. Requires the `solver` section.
    #[serde(default)]
    pub simulate: bool,
}
