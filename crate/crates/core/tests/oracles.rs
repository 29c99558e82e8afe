//! Values frozen from independent evaluations, plus closed-form examples.

use approx::assert_relative_eq;
use num_complex::Complex64;

use ncsep::canonical::{build_q, derived_params, polynomial_check, OscillatorParams};
use ncsep::covariance::{commutative_limit_ps, Normalization};
use ncsep::experiment::{find_transitions, grid, toy_config, toy_pipeline_ps, toy_ps_closed_form, Direction};
use ncsep::pipeline::evaluate;
use ncsep::schedule::OscillatorConfig;
use ncsep::separability::Verdict;
use ncsep::symplectic::{effective_planck, NcParams};

fn toy_at(t: f64) -> (OscillatorParams, NcParams) {
    let s = toy_config().at(t).unwrap();
    (s.osc, s.nc)
}

#[test]
fn toy_origin_characteristic_polynomial() {
    let (osc, nc) = toy_at(0.0);
    let dp = derived_params(&osc, &nc).unwrap();
    assert_relative_eq!(dp.b, 6.0, max_relative = 1e-15);
    assert_relative_eq!(dp.c, 1.0, max_relative = 1e-15);
    let pc = polynomial_check(&dp);
    assert_relative_eq!(pc.b_trace, 6.0, max_relative = 1e-14);
    assert_relative_eq!(pc.c_det, 1.0, max_relative = 1e-14);
    assert_relative_eq!(pc.b_six, 5.5, max_relative = 1e-15);
    let nm = build_q(&dp).unwrap();
    assert_relative_eq!(nm.lambda1(), 1.0 + 2f64.sqrt(), max_relative = 1e-15);
    assert_relative_eq!(nm.lambda2(), 2f64.sqrt() - 1.0, max_relative = 1e-14);
}

// Reference values from a numpy evaluation that takes the eigenvectors of
// Ω from a general eigensolver and rescales them to the closed-form γ₂.
#[test]
fn toy_pipeline_matches_eigensolver_reference() {
    assert_relative_eq!(toy_pipeline_ps(0.0).unwrap(), 257792.06250003728, max_relative = 1e-10);
    assert_relative_eq!(toy_pipeline_ps(240.0).unwrap(), -0.003912925391003713, max_relative = 1e-7);
    assert_relative_eq!(toy_pipeline_ps(1e6).unwrap(), 0.06249999180799208, max_relative = 1e-9);
    let p = evaluate(&toy_config(), 240.0, (0, 0), Normalization::Unnormalized).unwrap();
    assert_relative_eq!(p.lambda1, 1.066488203723492, max_relative = 1e-12);
    assert_relative_eq!(p.lambda2, 0.9376568784433262, max_relative = 1e-12);
    assert_eq!(p.report.verdict, Verdict::Entangled);
}

#[test]
fn toy_pipeline_transitions() {
    let ts = grid(0.0, 400.0, 0.5).unwrap();
    let ps: Vec<f64> = ts.iter().map(|&t| toy_pipeline_ps(t).unwrap()).collect();
    let tr = find_transitions(&ts, &ps, toy_pipeline_ps, 1e-6).unwrap();
    assert_eq!(tr.len(), 2);
    assert!((tr[0].t - 220.31067800783296).abs() < 1e-5, "{}", tr[0].t);
    assert!((tr[1].t - 284.6335326273427).abs() < 1e-5, "{}", tr[1].t);
    assert_eq!(tr[0].direction, Direction::SeparableToEntangled);
    assert_eq!(tr[1].direction, Direction::EntangledToSeparable);
}

#[test]
fn closed_form_transitions_bracket_printed_values() {
    let ts = grid(0.0, 400.0, 0.5).unwrap();
    let ps: Vec<f64> = ts.iter().map(|&t| toy_ps_closed_form(t)).collect();
    let tr = find_transitions(&ts, &ps, |t| Ok(toy_ps_closed_form(t)), 1e-6).unwrap();
    assert_eq!(tr.len(), 2);
    assert!((tr[0].t - 213.001).abs() < 0.5);
    assert!((tr[1].t - 275.331).abs() < 0.5);
}

#[test]
fn commutative_limit_reference() {
    let w1 = 1.2_f64;
    let cfg = |e: f64| OscillatorConfig::constant((1.0 / w1, 1.0), (w1, 1.0), e, e, 1.0);
    let got: Vec<f64> = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|&e| evaluate(&cfg(e), 0.0, (0, 0), Normalization::Unnormalized).unwrap().report.ps)
        .collect();
    let reference = [0.0529409963480681, 0.05312974121578305, 0.05312975999812157];
    for (g, r) in got.iter().zip(reference) {
        assert_relative_eq!(*g, r, max_relative = 1e-9);
    }
    assert_relative_eq!(commutative_limit_ps(1.0 / w1, 1.0, w1, 1.0), 0.05312976, max_relative = 1e-12);
}

#[test]
fn commutative_limit_examples() {
    assert_eq!(commutative_limit_ps(1.0, 1.0, 1.0, 1.0), 1.0 / 16.0);
    let w1 = (1.0 + 0.5f64.sqrt()).sqrt();
    assert!(commutative_limit_ps(1.0 / w1, 1.0, w1, 1.0).abs() < 1e-12);
    let w1 = 3f64.sqrt();
    assert!(commutative_limit_ps(1.0 / w1, 1.0, w1, 1.0) < 0.0);
}

#[test]
fn isotropic_commutative_vacuum() {
    let cfg = OscillatorConfig::constant((1.0, 1.0), (1.0, 1.0), 0.0, 0.0, 1.0);
    // The physical vacuum is a product state sitting exactly on Ps = 0.
    let r = evaluate(&cfg, 0.0, (0, 0), Normalization::Symplectic).unwrap().report;
    assert_eq!(r.verdict, Verdict::Marginal);
    assert!(r.ps.abs() < 1e-15);
    assert!(r.rsup_ok);
    // Unscaled γ vanish on the isotropic point, leaving only the constant term.
    let r = evaluate(&cfg, 0.0, (0, 0), Normalization::Unnormalized).unwrap().report;
    assert_eq!(r.verdict, Verdict::Separable);
    assert_relative_eq!(r.ps, 1.0 / 16.0, max_relative = 1e-14);
}

#[test]
fn effective_planck_examples() {
    assert_eq!(effective_planck(0.0, 0.0, 1.0).unwrap(), 1.0);
    assert_relative_eq!(effective_planck(1.0, 1.0, 1.0).unwrap(), 1.25, max_relative = 1e-15);
    assert_eq!(effective_planck(0.5, 0.0, 1.0).unwrap(), 1.0);
    assert!(effective_planck(-0.1, 0.0, 1.0).is_err());
    assert!(effective_planck(0.1, 0.1, 0.0).is_err());
}

#[test]
fn report_serializes_flat() {
    let r = evaluate(&toy_config(), 0.0, (0, 0), Normalization::Unnormalized).unwrap().report;
    let v = serde_json::to_value(r).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["delta1", "delta12", "delta2", "delta_v", "ps", "rsup_ok", "tau_v", "verdict"]);
    assert_eq!(v["verdict"], "separable");
    let excited = evaluate(&toy_config(), 0.0, (1, 0), Normalization::Unnormalized).unwrap().report;
    assert_eq!(serde_json::to_value(excited).unwrap()["non_gaussian"], true);
}

#[test]
fn displaced_toy_covariance_matches_undisplaced() {
    use ncsep::covariance::{covariance_via_expectations, nc_covariance, q13_moments, symplectic_gammas};
    let (osc, nc) = toy_at(0.0);
    let nm = build_q(&derived_params(&osc, &nc).unwrap()).unwrap();
    let base = nc_covariance(&q13_moments(&symplectic_gammas(&nm), 0, 0), &nc).unwrap();
    let beta = (Complex64::new(5.0, -3.0), Complex64::new(0.0, 7.0));
    let shifted = covariance_via_expectations(beta, &nm, &nc, 0, 0).unwrap();
    assert!(ncsep::linalg::max_abs(&(base.entries() - shifted.entries())) < 1e-12);
}
