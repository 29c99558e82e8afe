//! Parameters at one instant to a separability report.

use serde::Serialize;

use crate::canonical::{build_q, derived_params};
use crate::covariance::{commutative_blocks, q13_moments, symplectic_gammas, unnormalized_gammas, Normalization};
use crate::error::Result;
use crate::schedule::{OscillatorConfig, Snapshot};
use crate::separability::{separability_report, CovarianceMatrix, SeparabilityReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelinePoint {
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(skip)]
    pub covariance: CovarianceMatrix,
    pub report: SeparabilityReport,
}

pub fn evaluate_snapshot(
    t: f64,
    snap: &Snapshot,
    state: (u32, u32),
    norm: Normalization,
) -> Result<PipelinePoint> {
    let dp = derived_params(&snap.osc, &snap.nc)?;
    let (lambda1, lambda2, gammas) = match norm {
        Normalization::Symplectic => {
            let nm = build_q(&dp)?;
            (nm.lambda1(), nm.lambda2(), symplectic_gammas(&nm))
        }
        Normalization::Unnormalized => unnormalized_gammas(&dp)?,
    };
    let covariance = commutative_blocks(&q13_moments(&gammas, state.0, state.1))?;
    let mut report = separability_report(&covariance, snap.nc.hbar())?;
    report.non_gaussian = state != (0, 0);
    Ok(PipelinePoint { t, lambda1, lambda2, covariance, report })
}

pub fn evaluate(cfg: &OscillatorConfig, t: f64, state: (u32, u32), norm: Normalization) -> Result<PipelinePoint> {
    evaluate_snapshot(t, &cfg.at(t)?, state, norm)
}
