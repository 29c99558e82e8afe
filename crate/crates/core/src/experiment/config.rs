//! Run configuration, read from JSON or TOML.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covariance::Normalization;
use crate::error::{Error, Result};
use crate::schedule::{OscillatorConfig, Schedule};

/// A schedule or a bare number meaning a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Value(f64),
    Schedule(Schedule),
}

impl From<ScheduleSpec> for Schedule {
    fn from(s: ScheduleSpec) -> Self {
        match s {
            ScheduleSpec::Value(v) => Schedule::constant(v),
            ScheduleSpec::Schedule(s) => s,
        }
    }
}

fn zero() -> ScheduleSpec {
    ScheduleSpec::Value(0.0)
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NcSection {
    #[serde(default = "zero")]
    pub theta: ScheduleSpec,
    #[serde(default = "zero")]
    pub eta: ScheduleSpec,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl Default for NcSection {
    fn default() -> Self {
        NcSection { theta: zero(), eta: zero(), hbar: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSection {
    pub m1: ScheduleSpec,
    pub m2: ScheduleSpec,
    pub w1: ScheduleSpec,
    pub w2: ScheduleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default = "zero")]
    pub e1: ScheduleSpec,
    #[serde(default = "zero")]
    pub e2: ScheduleSpec,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection { e1: zero(), e2: zero() }
    }
}

/// Occupation numbers and initial displacements `βⱼ₀ = [re, im]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub n1: u32,
    pub n2: u32,
    pub beta1: [f64; 2],
    pub beta2: [f64; 2],
}

impl StateSection {
    pub fn beta0(&self) -> [Complex64; 2] {
        [Complex64::new(self.beta1[0], self.beta1[1]), Complex64::new(self.beta2[0], self.beta2[1])]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub t_start: f64,
    pub t_end: f64,
    pub t_step: f64,
    pub refine_tol: f64,
    pub normalization: Normalization,
    /// Integrator tolerance for `phases`.
    pub tol: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            t_start: 0.0,
            t_end: 400.0,
            t_step: 0.5,
            refine_tol: 1e-3,
            normalization: Normalization::default(),
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub format: Format,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub nc: NcSection,
    pub oscillator: OscillatorSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Picks the parser from the extension; anything other than `.json`
    /// is read as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn oscillator(&self) -> OscillatorConfig {
        let s = |x: &ScheduleSpec| Schedule::from(x.clone());
        OscillatorConfig {
            m1: s(&self.oscillator.m1),
            m2: s(&self.oscillator.m2),
            w1: s(&self.oscillator.w1),
            w2: s(&self.oscillator.w2),
            e1: s(&self.drive.e1),
            e2: s(&self.drive.e2),
            theta: s(&self.nc.theta),
            eta: s(&self.nc.eta),
            hbar: self.nc.hbar,
        }
    }

    pub fn state(&self) -> (u32, u32) {
        (self.state.n1, self.state.n2)
    }

    pub fn validate(&self) -> Result<()> {
        self.oscillator().validate()?;
        let sw = &self.sweep;
        for (name, v) in [("t_start", sw.t_start), ("t_end", sw.t_end), ("t_step", sw.t_step), ("refine_tol", sw.refine_tol)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("sweep.{name} must be finite")));
            }
        }
        if sw.t_step <= 0.0 {
            return Err(Error::Config(format!("sweep.t_step must be positive, got {}", sw.t_step)));
        }
        if sw.refine_tol <= 0.0 {
            return Err(Error::Config(format!("sweep.refine_tol must be positive, got {}", sw.refine_tol)));
        }
        if !(1e-12..=1e-4).contains(&sw.tol) {
            return Err(Error::Config(format!("sweep.tol {:e} outside [1e-12, 1e-4]", sw.tol)));
        }
        if !self.state.beta1.iter().chain(&self.state.beta2).all(|v| v.is_finite()) {
            return Err(Error::Config("state.beta must be finite".into()));
        }
        Ok(())
    }
}
