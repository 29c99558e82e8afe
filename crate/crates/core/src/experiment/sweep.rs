//! Pipeline evaluation over a time grid.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::covariance::Normalization;
use crate::error::{Error, Result};
use crate::experiment::toy::{toy_config, toy_ps_closed_form};
use crate::fmt_float;
use crate::pipeline::evaluate;
use crate::schedule::OscillatorConfig;
use crate::separability::SeparabilityReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(flatten)]
    pub report: SeparabilityReport,
    pub ps_closed_form: Option<f64>,
}

/// A sweep that stopped at `t`, with the records completed before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("sweep stopped at t = {t} after {} records: {source}", completed.len())]
pub struct SweepFailure {
    pub t: f64,
    pub completed: Vec<SweepRecord>,
    pub source: Error,
}

/// `t_start, t_start + step, …` up to `t_end` inclusive; empty when
/// `t_end < t_start`.
pub fn grid(t_start: f64, t_end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(Error::Validation(format!("bad grid [{t_start}, {t_end}] step {step}")));
    }
    if t_end < t_start {
        return Ok(Vec::new());
    }
    let n = ((t_end - t_start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| t_start + i as f64 * step).collect())
}

pub fn sweep(
    cfg: &OscillatorConfig,
    times: &[f64],
    state: (u32, u32),
    norm: Normalization,
) -> std::result::Result<Vec<SweepRecord>, SweepFailure> {
    let with_closed_form = *cfg == toy_config() && state == (0, 0);
    let results: Vec<Result<SweepRecord>> = times
        .par_iter()
        .map(|&t| {
            let p = evaluate(cfg, t, state, norm)?;
            Ok(SweepRecord {
                t,
                lambda1: p.lambda1,
                lambda2: p.lambda2,
                report: p.report,
                ps_closed_form: with_closed_form.then(|| toy_ps_closed_form(t)),
            })
        })
        .collect();
    let mut completed = Vec::with_capacity(results.len());
    for (t, r) in times.iter().zip(results) {
        match r {
            Ok(rec) => completed.push(rec),
            Err(source) => return Err(SweepFailure { t: *t, completed, source }),
        }
    }
    Ok(completed)
}

pub const CSV_HEADER: &str = "t,lambda1,lambda2,delta1,delta2,delta12,tau_v,ps,ps_closed_form,rsup_ok,verdict";

pub fn write_csv<W: Write>(records: &[SweepRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let x = &r.report;
        let nums = [r.t, r.lambda1, r.lambda2, x.delta1, x.delta2, x.delta12, x.tau_v, x.ps].map(fmt_float);
        let cf = r.ps_closed_form.map(fmt_float).unwrap_or_default();
        writeln!(w, "{},{},{},{}", nums.join(","), cf, x.rsup_ok, x.verdict)?;
    }
    Ok(())
}
