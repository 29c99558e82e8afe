//! Time-dependent parameter schedules and the oscillator configuration built
//! from them.

use serde::{Deserialize, Serialize};

use crate::canonical::{Drives, OscillatorParams};
use crate::error::{Error, Result};
use crate::symplectic::NcParams;

/// A scalar function of time, tagged by `kind` when serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant { value: f64 },
    /// `a / √(1 + b·t)`
    InverseSqrt { a: f64, b: f64 },
    /// `a·(1 + b·t)^p`
    PowerLaw { a: f64, b: f64, p: f64 },
    /// Piecewise-linear through `(t, value)` knots.
    Table { points: Vec<(f64, f64)> },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            Schedule::Constant { value } => *value,
            Schedule::InverseSqrt { a, b } => {
                let base = 1.0 + b * t;
                if base <= 0.0 {
                    return Err(Error::Domain(format!("inverse_sqrt base 1+bt = {base} at t = {t}")));
                }
                a / base.sqrt()
            }
            Schedule::PowerLaw { a, b, p } => {
                let base = 1.0 + b * t;
                if base <= 0.0 {
                    return Err(Error::Domain(format!("power_law base 1+bt = {base} at t = {t}")));
                }
                a * base.powf(*p)
            }
            Schedule::Table { points } => interpolate(points, t)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("schedule not finite at t = {t}")))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Schedule::Table { points } = self {
            if points.is_empty() {
                return Err(Error::Config("table schedule needs at least one point".into()));
            }
            if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::Config("table knots must be strictly increasing".into()));
            }
        }
        Ok(())
    }
}

fn interpolate(points: &[(f64, f64)], t: f64) -> Result<f64> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::Domain("empty table schedule".into())),
    };
    if t < first.0 || t > last.0 {
        return Err(Error::Domain(format!(
            "t = {t} outside table range [{}, {}]",
            first.0, last.0
        )));
    }
    let i = points.partition_point(|p| p.0 <= t);
    if i == points.len() {
        return Ok(last.1);
    }
    let (t0, v0) = points[i - 1];
    let (t1, v1) = points[i];
    Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

/// Time-dependent oscillator: masses, bare frequencies, drives and NC
/// parameters as schedules, with a constant ħ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorConfig {
    pub m1: Schedule,
    pub m2: Schedule,
    pub w1: Schedule,
    pub w2: Schedule,
    pub e1: Schedule,
    pub e2: Schedule,
    pub theta: Schedule,
    pub eta: Schedule,
    pub hbar: f64,
}

/// All instantaneous parameters at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub osc: OscillatorParams,
    pub drives: Drives,
    pub nc: NcParams,
}

impl OscillatorConfig {
    /// Constant masses/frequencies, no drive, constant NC parameters.
    pub fn constant(m: (f64, f64), w: (f64, f64), theta: f64, eta: f64, hbar: f64) -> Self {
        OscillatorConfig {
            m1: Schedule::constant(m.0),
            m2: Schedule::constant(m.1),
            w1: Schedule::constant(w.0),
            w2: Schedule::constant(w.1),
            e1: Schedule::constant(0.0),
            e2: Schedule::constant(0.0),
            theta: Schedule::constant(theta),
            eta: Schedule::constant(eta),
            hbar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for s in [&self.m1, &self.m2, &self.w1, &self.w2, &self.e1, &self.e2, &self.theta, &self.eta] {
            s.validate()?;
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive, got {}", self.hbar)));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> Result<Snapshot> {
        let osc = OscillatorParams::new(self.m1.eval(t)?, self.m2.eval(t)?, self.w1.eval(t)?, self.w2.eval(t)?)?;
        let drives = Drives { e1: self.e1.eval(t)?, e2: self.e2.eval(t)? };
        let nc = NcParams::new(self.theta.eval(t)?, self.eta.eval(t)?, self.hbar)?;
        Ok(Snapshot { osc, drives, nc })
    }
}
