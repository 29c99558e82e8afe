//! Covariance matrices, local symplectic invariants, the uncertainty
//! principle and Simon's separability functional.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block, from_blocks, hermitian_min_eigenvalue, j2, max_abs, to_complex, Mat2, Mat4,
};
use crate::symplectic::{bopp_shift_inverse, standard_symplectic, NcParams};

/// Absolute symmetry tolerance, scaled by `max(1, ‖V‖∞)`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Default floor for the smallest eigenvalue of `V + (i/2)ħJ`.
pub const RSUP_TOL: f64 = -1e-10;
/// Relative half-width of the `Marginal` band around `Ps = 0`.
pub const PS_DEAD_ZONE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Commutative,
    Noncommutative,
}

/// Symmetric 4×4 second-moment matrix over `(x₁, p₁, x₂, p₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    entries: Mat4,
    frame: Frame,
}

impl CovarianceMatrix {
    /// Checks finiteness and symmetry, then stores the exact symmetric part.
    pub fn new(entries: Mat4, frame: Frame) -> Result<Self> {
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("covariance has non-finite entries".into()));
        }
        let asym = max_abs(&(entries - entries.transpose()));
        let scale = max_abs(&entries).max(1.0);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::Validation(format!("covariance not symmetric (max asymmetry {asym:e})")));
        }
        let entries = (entries + entries.transpose()) * 0.5;
        Ok(Self { entries, frame })
    }

    pub fn commutative(entries: Mat4) -> Result<Self> {
        Self::new(entries, Frame::Commutative)
    }

    pub fn noncommutative(entries: Mat4) -> Result<Self> {
        Self::new(entries, Frame::Noncommutative)
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn v11(&self) -> Mat2 {
        block(&self.entries, 0, 0)
    }
    pub fn v12(&self) -> Mat2 {
        block(&self.entries, 0, 1)
    }
    pub fn v22(&self) -> Mat2 {
        block(&self.entries, 1, 1)
    }

    fn require(&self, frame: Frame) -> Result<()> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(Error::Validation(format!("expected {frame:?} frame, got {:?}", self.frame)))
        }
    }
}

/// The four local symplectic invariants plus `det V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub delta1: f64,
    pub delta2: f64,
    pub delta12: f64,
    pub delta_v: f64,
    pub tau_v: f64,
}

pub fn local_invariants(v: &CovarianceMatrix) -> Result<LocalInvariants> {
    v.require(Frame::Commutative)?;
    let (a, c, b) = (v.v11(), v.v12(), v.v22());
    let j = j2();
    let tau = (a * j * c * j * b * j * c.transpose() * j).trace();
    Ok(LocalInvariants {
        delta1: a.determinant(),
        delta2: b.determinant(),
        delta12: c.determinant(),
        delta_v: v.entries.determinant(),
        tau_v: tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsupStatus {
    pub holds: bool,
    pub min_eigenvalue: f64,
    /// `Δ₁Δ₂ + (ħ²/4 − Δ₁₂)² − τ − (ħ²/4)(Δ₁+Δ₂)`.
    pub scalar_slack: f64,
    /// Scalar slack is non-negative up to `PS_DEAD_ZONE` relative to its terms.
    pub scalar_holds: bool,
}

pub fn rsup_check(v: &CovarianceMatrix, hbar: f64) -> Result<RsupStatus> {
    rsup_check_with(v, hbar, RSUP_TOL)
}

pub fn rsup_check_with(v: &CovarianceMatrix, hbar: f64, floor: f64) -> Result<RsupStatus> {
    let inv = local_invariants(v)?;
    let m = to_complex(&v.entries)
        + to_complex(&standard_symplectic()) * Complex64::new(0.0, 0.5 * hbar);
    let min_eigenvalue = hermitian_min_eigenvalue(&m);
    let q = hbar * hbar / 4.0;
    let terms = [
        inv.delta1 * inv.delta2,
        (q - inv.delta12).powi(2),
        inv.tau_v,
        q * (inv.delta1 + inv.delta2),
    ];
    let scalar_slack = terms[0] + terms[1] - terms[2] - terms[3];
    Ok(RsupStatus {
        holds: min_eigenvalue >= floor,
        min_eigenvalue,
        scalar_slack,
        scalar_holds: scalar_slack >= -dead_zone(&terms),
    })
}

fn dead_zone(terms: &[f64]) -> f64 {
    PS_DEAD_ZONE * terms.iter().fold(1.0_f64, |a, t| a.max(t.abs()))
}

fn ps_terms(inv: &LocalInvariants, hbar: f64) -> [f64; 4] {
    let q = hbar * hbar / 4.0;
    [
        inv.delta1 * inv.delta2,
        (q - inv.delta12.abs()).powi(2),
        inv.tau_v,
        q * (inv.delta1 + inv.delta2),
    ]
}

pub fn simon_ps_from_invariants(inv: &LocalInvariants, hbar: f64) -> f64 {
    let t = ps_terms(inv, hbar);
    t[0] + t[1] - t[2] - t[3]
}

/// Simon's functional `Ps`; `Ps ≥ 0` is necessary for separability and
/// sufficient for Gaussian states.
pub fn simon_ps(v: &CovarianceMatrix, hbar: f64) -> Result<f64> {
    Ok(simon_ps_from_invariants(&local_invariants(v)?, hbar))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Separable,
    Entangled,
    Marginal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Separable => "separable",
            Verdict::Entangled => "entangled",
            Verdict::Marginal => "marginal",
        })
    }
}

pub fn verdict(inv: &LocalInvariants, hbar: f64) -> Verdict {
    let t = ps_terms(inv, hbar);
    let ps = t[0] + t[1] - t[2] - t[3];
    let zone = dead_zone(&t);
    if ps > zone {
        Verdict::Separable
    } else if ps < -zone {
        Verdict::Entangled
    } else {
        Verdict::Marginal
    }
}

/// Flat record of everything needed to judge separability.
///
/// The verdict only applies to Gaussian states; `non_gaussian` is set when
/// the state has nonzero occupation and is omitted from JSON otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub delta1: f64,
    pub delta2: f64,
    pub delta12: f64,
    pub delta_v: f64,
    pub tau_v: f64,
    pub ps: f64,
    pub rsup_ok: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_gaussian: bool,
}

pub fn separability_report(v: &CovarianceMatrix, hbar: f64) -> Result<SeparabilityReport> {
    let inv = local_invariants(v)?;
    let rsup = rsup_check(v, hbar)?;
    Ok(SeparabilityReport {
        delta1: inv.delta1,
        delta2: inv.delta2,
        delta12: inv.delta12,
        delta_v: inv.delta_v,
        tau_v: inv.tau_v,
        ps: simon_ps_from_invariants(&inv, hbar),
        rsup_ok: rsup.holds,
        verdict: verdict(&inv, hbar),
        non_gaussian: false,
    })
}

/// Partial transpose `p₂ → −p₂`.
pub fn mirror_reflection(v: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    v.require(Frame::Commutative)?;
    let l = Mat4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    Ok(CovarianceMatrix { entries: l * v.entries * l, frame: Frame::Commutative })
}

/// Per-mode symplectic eigenvalues `dⱼ = √det Vⱼⱼ`.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<(f64, f64)> {
    let inv = local_invariants(v)?;
    if inv.delta1 < 0.0 || inv.delta2 < 0.0 {
        return Err(Error::Validation(format!(
            "negative block determinant ({}, {})",
            inv.delta1, inv.delta2
        )));
    }
    Ok((inv.delta1.sqrt(), inv.delta2.sqrt()))
}

/// Parameters of the standard form `V₁₁ = aI`, `V₂₂ = bI`,
/// `V₁₂ = diag(κ₁, κ₂)` reachable by local symplectic maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilliamsonForm {
    pub a: f64,
    pub b: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

/// Recovers `(a, b, κ₁, κ₂)` from `Δ₁, Δ₂, Δ₁₂, det V`.
///
/// `κ₁ ≥ |κ₂|`, and `κ₂` carries the sign of `Δ₁₂`.
pub fn williamson_form(v: &CovarianceMatrix) -> Result<WilliamsonForm> {
    let inv = local_invariants(v)?;
    if inv.delta1 <= 0.0 || inv.delta2 <= 0.0 {
        return Err(Error::Validation("Williamson form needs positive block determinants".into()));
    }
    let (a, b) = (inv.delta1.sqrt(), inv.delta2.sqrt());
    let p = inv.delta12;
    let s = (inv.delta1 * inv.delta2 + p * p - inv.delta_v) / (a * b);
    let disc = s * s - 4.0 * p * p;
    let slack = 1e-9 * s.abs().max(1.0).powi(2);
    if disc < -slack || s < -slack.sqrt() {
        return Err(Error::Validation(format!("no real Williamson form (disc = {disc:e})")));
    }
    let root = disc.max(0.0).sqrt();
    let k1sq = ((s + root) / 2.0).max(0.0);
    let k2sq = ((s - root) / 2.0).max(0.0);
    Ok(WilliamsonForm { a, b, kappa1: k1sq.sqrt(), kappa2: p.signum() * k2sq.sqrt() })
}

/// Maps an NC-frame covariance to commutative coordinates via the block
/// expressions for `Υ_D⁻¹·Ṽ·Υ_D⁻ᵀ`.
pub fn nc_to_commutative(v_nc: &CovarianceMatrix, nc: &NcParams) -> Result<CovarianceMatrix> {
    v_nc.require(Frame::Noncommutative)?;
    let det = nc.schur_determinant();
    if det < crate::symplectic::SINGULAR_THRESHOLD {
        return Err(Error::Singular(det));
    }
    let p = nc.pi() * j2() / (2.0 * nc.hbar());
    let pt = p.transpose();
    let (a, c, b) = (v_nc.v11(), v_nc.v12(), v_nc.v22());
    let ct = c.transpose();
    let v11 = (a + c * pt + p * ct + p * b * pt) / det;
    let v12 = (-a * pt + c - p * ct * pt + p * b) / det;
    let v22 = (p * a * pt - p * c - ct * pt + b) / det;
    CovarianceMatrix::commutative(from_blocks(&v11, &v12, &v12.transpose(), &v22))
}

/// Same map evaluated as a plain matrix conjugation.
pub fn nc_to_commutative_conjugation(v_nc: &CovarianceMatrix, nc: &NcParams) -> Result<CovarianceMatrix> {
    v_nc.require(Frame::Noncommutative)?;
    let inv = bopp_shift_inverse(nc)?;
    CovarianceMatrix::commutative(inv * v_nc.entries * inv.transpose())
}

/// `Ṽ = Υ_D·V·Υ_Dᵀ`.
pub fn commutative_to_nc(v: &CovarianceMatrix, nc: &NcParams) -> Result<CovarianceMatrix> {
    v.require(Frame::Commutative)?;
    let u = crate::symplectic::bopp_shift(nc);
    CovarianceMatrix::noncommutative(u * v.entries * u.transpose())
}
