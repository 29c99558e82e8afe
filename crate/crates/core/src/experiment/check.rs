//! Structural identities of the pipeline evaluated at one instant.

use num_complex::Complex64;
use serde::Serialize;

use crate::canonical::{build_hamiltonian, build_omega, build_q, derived_params, hamiltonian_asymmetry};
use crate::covariance::{commutative_blocks, covariance_via_expectations, nc_covariance, q13_moments, symplectic_gammas};
use crate::error::Result;
use crate::linalg::{max_abs, Mat4};
use crate::schedule::OscillatorConfig;
use crate::separability::{nc_to_commutative, rsup_check};
use crate::symplectic::{bopp_shift, bopp_shift_inverse, symplectic_correspondence_residual};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub limit: f64,
    pub ok: bool,
}

fn upper(value: f64, limit: f64) -> Residual {
    Residual { value, limit, ok: value <= limit }
}

fn lower(value: f64, limit: f64) -> Residual {
    Residual { value, limit, ok: value >= limit }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckReport {
    pub t: f64,
    pub symplectic_correspondence: Residual,
    pub bopp_inverse: Residual,
    pub hamiltonian_symmetry: Residual,
    pub diagonalization: Residual,
    pub adjoint: Residual,
    pub commutator: Residual,
    pub b: Residual,
    pub c: Residual,
    pub delta: Residual,
    pub frequency_product: Residual,
    pub rsup_min_eigenvalue: Residual,
    pub rsup_scalar_agrees: bool,
    pub beta_independence: Residual,
    pub frame_paths: Residual,
    pub ok: bool,
}

/// Evaluates every identity at `t` with the symplectically normalized
/// modes and the vacuum state; `beta` drives the displacement check.
pub fn check_point(cfg: &OscillatorConfig, t: f64, beta: [Complex64; 2]) -> Result<CheckReport> {
    let snap = cfg.at(t)?;
    let nc = snap.nc;
    let dp = derived_params(&snap.osc, &nc)?;
    let nm = build_q(&dp)?;
    let (h, _) = build_hamiltonian(&dp, &snap.drives, Some(&nc));
    let omega = build_omega(&h);

    let inv = bopp_shift_inverse(&nc)?;
    let bopp = max_abs(&(inv * bopp_shift(&nc) - Mat4::identity()));
    let (l1, l2) = (nm.lambda1(), nm.lambda2());
    let root_c = dp.c.max(0.0).sqrt();
    let product = (l1 * l2 - root_c).abs() / root_c.max(f64::MIN_POSITIVE);

    let qm = q13_moments(&symplectic_gammas(&nm), 0, 0);
    let v_nc = nc_covariance(&qm, &nc)?;
    let v = commutative_blocks(&qm)?;
    let rsup = rsup_check(&v, nc.hbar())?;
    let shifted = covariance_via_expectations((beta[0], beta[1]), &nm, &nc, 0, 0)?;
    let beta_dev = max_abs(&(shifted.entries() - v_nc.entries()));
    let frames = max_abs(&(nc_to_commutative(&v_nc, &nc)?.entries() - v.entries()));

    let mut r = CheckReport {
        t,
        symplectic_correspondence: upper(symplectic_correspondence_residual(&nc), 1e-13),
        bopp_inverse: upper(bopp, 1e-12),
        hamiltonian_symmetry: upper(hamiltonian_asymmetry(&h), 0.0),
        diagonalization: upper(nm.diagonalization_residual(&omega), 1e-10),
        adjoint: upper(nm.adjoint_residual(), 1e-10),
        commutator: upper(nm.commutator_residual(), 1e-10),
        b: Residual { value: dp.b, limit: 0.0, ok: dp.b > 0.0 },
        c: lower(dp.c, -1e-12),
        delta: lower(dp.delta, -1e-12),
        frequency_product: upper(product, 1e-10),
        rsup_min_eigenvalue: lower(rsup.min_eigenvalue, crate::separability::RSUP_TOL),
        rsup_scalar_agrees: rsup.holds == rsup.scalar_holds,
        beta_independence: upper(beta_dev, 1e-11),
        frame_paths: upper(frames, 1e-12),
        ok: false,
    };
    r.ok = [
        r.symplectic_correspondence,
        r.bopp_inverse,
        r.hamiltonian_symmetry,
        r.diagonalization,
        r.adjoint,
        r.commutator,
        r.b,
        r.c,
        r.delta,
        r.frequency_product,
        r.rsup_min_eigenvalue,
        r.beta_independence,
        r.frame_paths,
    ]
    .iter()
    .all(|x| x.ok)
        && r.rsup_scalar_agrees;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_model_passes() {
        let cfg = crate::experiment::toy_config();
        for t in [0.0, 10.0, 240.0, 400.0] {
            let r = check_point(&cfg, t, [Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)]).unwrap();
            assert!(r.ok, "{r:#?}");
        }
    }
}
