//! The two-mode toy model: `ħ = 1`, `m₁ = 1`, `m₂ = 4`, `ω̃₁ = ω̃₂ = 1`,
//! `η = 0`, `θ(t) = 1/√(1+t)`.

use serde::Serialize;

use crate::covariance::Normalization;
use crate::error::Result;
use crate::experiment::sweep::SweepRecord;
use crate::experiment::transitions::{find_transitions, sign_runs, SignRun, Transition};
use crate::linalg::compensated_horner;
use crate::pipeline::evaluate;
use crate::schedule::{OscillatorConfig, Schedule};

/// Largest acceptable gap between matching pipeline and closed-form
/// transitions.
pub const TRANSITION_AGREEMENT: f64 = 0.5;

pub fn toy_config() -> OscillatorConfig {
    OscillatorConfig {
        theta: Schedule::InverseSqrt { a: 1.0, b: 1.0 },
        ..OscillatorConfig::constant((1.0, 4.0), (1.0, 1.0), 0.0, 0.0, 1.0)
    }
}

// Ascending coefficients of the rational and t₇ parts of the numerator.
const RATIONAL: [f64; 13] = [
    2048.0 * 29038819.0,
    8192.0 * 43306567.0,
    512.0 * 1776825135.0,
    512.0 * 2555083273.0,
    128.0 * 9004286997.0,
    256.0 * 2486103583.0,
    32.0 * 6717167061.0,
    32.0 * 1267439685.0,
    16.0 * 204010327.0,
    -32.0 * 78689.0,
    -8.0 * 14431.0,
    24.0,
    1.0,
];

const RADICAL: [f64; 11] = [
    2048.0 * 2642044.0,
    8192.0 * 4360181.0,
    512.0 * 199309604.0,
    512.0 * 321598952.0,
    128.0 * 1281090628.0,
    256.0 * 402820658.0,
    32.0 * 1248828188.0,
    32.0 * 272489392.0,
    16.0 * 51198584.0,
    -32.0 * 10264.0,
    -8.0 * 2048.0,
];

/// Printed closed form `Ps(t) = P(t)/(16(2+t)¹²)` with
/// `t₇ = √(7(15+8t))/(1+t)`.
pub fn toy_ps_closed_form(t: f64) -> f64 {
    let t7 = (7.0 * (15.0 + 8.0 * t)).sqrt() / (1.0 + t);
    let a = compensated_horner(&RATIONAL, t);
    let b = compensated_horner(&RADICAL, t);
    let d = (2.0 + t).powi(12);
    (a / d + t7 * (b / d)) / 16.0
}

pub fn toy_pipeline_ps(t: f64) -> Result<f64> {
    Ok(evaluate(&toy_config(), t, (0, 0), Normalization::Unnormalized)?.report.ps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyReport {
    pub pipeline_transitions: Vec<Transition>,
    pub closed_form_transitions: Vec<Transition>,
    pub pipeline_runs: Vec<SignRun>,
    pub closed_form_runs: Vec<SignRun>,
    /// Grid points where the two signs differ.
    pub sign_disagreements: Vec<f64>,
    /// Largest distance between paired transitions, `None` when the counts differ.
    pub max_transition_gap: Option<f64>,
    pub agree: bool,
}

/// Compares pipeline and closed form over sweep records carrying both.
pub fn toy_report(records: &[SweepRecord], refine_tol: f64) -> Result<ToyReport> {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let ps: Vec<f64> = records.iter().map(|r| r.report.ps).collect();
    let cf: Vec<f64> = records.iter().map(|r| r.ps_closed_form.unwrap_or_else(|| toy_ps_closed_form(r.t))).collect();
    let pipeline_transitions = find_transitions(&t, &ps, toy_pipeline_ps, refine_tol)?;
    let closed_form_transitions = find_transitions(&t, &cf, |x| Ok(toy_ps_closed_form(x)), refine_tol)?;
    let sign_disagreements: Vec<f64> =
        t.iter().zip(ps.iter().zip(&cf)).filter(|(_, (a, b))| (**a >= 0.0) != (**b >= 0.0)).map(|(t, _)| *t).collect();
    let max_transition_gap = (pipeline_transitions.len() == closed_form_transitions.len()).then(|| {
        pipeline_transitions.iter().zip(&closed_form_transitions).map(|(a, b)| (a.t - b.t).abs()).fold(0.0, f64::max)
    });
    let agree = sign_disagreements.is_empty() && max_transition_gap.is_some_and(|g| g <= TRANSITION_AGREEMENT);
    Ok(ToyReport {
        pipeline_runs: sign_runs(&t, &ps),
        closed_form_runs: sign_runs(&t, &cf),
        pipeline_transitions,
        closed_form_transitions,
        sign_disagreements,
        max_transition_gap,
        agree,
    })
}
