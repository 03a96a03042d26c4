//! Run configuration, read from TOML with sections `[grid]`, `[time]`,
//! `[data]` and `[diagnostics]`. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Homogeneous equation, zero torus mode only.
    LinearWave,
    /// Homogeneous equation, first torus mode only.
    LinearKg,
    /// Full quadratic source, both sectors seeded.
    FullNonlinear,
}

impl Mode {
    pub fn nonlinear(self) -> bool {
        self == Mode::FullNonlinear
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_cfl")]
    pub cfl_factor: f64,
}

fn default_cfl() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub mode: Mode,
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    /// Width of the Gaussian filter applied to the compact profiles.
    #[serde(default = "default_smoothing")]
    pub smoothing_length: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_smoothing() -> f64 {
    0.3
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "default_interval")]
    pub sample_interval: f64,
    #[serde(default = "default_high")]
    pub m_high: usize,
    #[serde(default = "default_mid")]
    pub m_mid: usize,
    #[serde(default)]
    pub m_low: usize,
    /// Times at which full snapshots are written (rounded to the next step).
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_true")]
    pub final_snapshot: bool,
}

fn default_interval() -> f64 {
    1.0
}
fn default_high() -> usize {
    2
}
fn default_mid() -> usize {
    1
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            sample_interval: default_interval(),
            m_high: default_high(),
            m_mid: default_mid(),
            m_low: 0,
            snapshot_times: Vec::new(),
            final_snapshot: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub time: TimeConfig,
    pub data: DataConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

fn bad(msg: String) -> Error {
    Error::Config(msg)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Largest admissible step.
    pub fn max_dt(&self) -> f64 {
        let lmax = self.grid.lambda_max();
        let bound = if lmax > 0.0 { self.grid.dx().min(1.0 / lmax) } else { self.grid.dx() };
        self.time.cfl_factor * bound
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let t = &self.time;
        if !(t.cfl_factor > 0.0 && t.cfl_factor <= 0.5) {
            return Err(bad(format!("cfl_factor = {} must lie in (0, 0.5]", t.cfl_factor)));
        }
        if !(t.dt > 0.0) || !t.dt.is_finite() {
            return Err(bad(format!("dt = {} must be positive", t.dt)));
        }
        if t.dt > self.max_dt() * (1.0 + 1e-12) {
            return Err(bad(format!("dt = {} violates the CFL bound {}", t.dt, self.max_dt())));
        }
        if !(t.t_final >= 0.0) || !t.t_final.is_finite() {
            return Err(bad(format!("t_final = {} must be non-negative", t.t_final)));
        }
        if t.t_final + 1.0 >= 0.5 * self.grid.box_length {
            return Err(bad(format!(
                "t_final + 1 = {} must stay below box_length / 2 = {}",
                t.t_final + 1.0,
                0.5 * self.grid.box_length
            )));
        }
        let d = &self.data;
        if !(d.amplitude >= 0.0) || !d.amplitude.is_finite() {
            return Err(bad(format!("amplitude = {} must be non-negative", d.amplitude)));
        }
        if !(d.smoothing_length >= 0.0) || !d.smoothing_length.is_finite() {
            return Err(bad("smoothing_length must be non-negative".into()));
        }
        if d.mode != Mode::LinearWave && (self.grid.d_active == 0 || self.grid.m_max == 0) {
            return Err(bad(format!("mode {:?} needs an active torus mode", d.mode)));
        }
        let g = &self.diagnostics;
        if !(g.sample_interval > 0.0) || !g.sample_interval.is_finite() {
            return Err(bad("sample_interval must be positive".into()));
        }
        if !(g.m_low <= g.m_mid && g.m_mid <= g.m_high) || g.m_high > 4 {
            return Err(bad(format!(
                "tiers must satisfy m_low <= m_mid <= m_high <= 4 (got {}, {}, {})",
                g.m_low, g.m_mid, g.m_high
            )));
        }
        if g.snapshot_times.iter().any(|s| !(*s >= 0.0 && *s <= t.t_final)) {
            return Err(bad("snapshot_times must lie in [0, t_final]".into()));
        }
        Ok(())
    }
}
