//! Standard and deformed symplectic forms, and the Bopp shift that links the
//! noncommutative coordinates to ordinary canonical ones.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{from_blocks, j2, max_abs, Mat2, Mat4};

/// Schur-complement determinants below this are treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Noncommutativity parameters together with the Planck constant.
///
/// `hbar_e` is cached at construction and always equals
/// `hbar·(1 + θη/4ħ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NcParamsRaw", into = "NcParamsRaw")]
pub struct NcParams {
    theta: f64,
    eta: f64,
    hbar: f64,
    hbar_e: f64,
}

#[derive(Serialize, Deserialize)]
struct NcParamsRaw {
    theta: f64,
    eta: f64,
    #[serde(default = "default_hbar")]
    hbar: f64,
}

fn default_hbar() -> f64 {
    1.0
}

impl TryFrom<NcParamsRaw> for NcParams {
    type Error = Error;
    fn try_from(raw: NcParamsRaw) -> Result<Self> {
        NcParams::new(raw.theta, raw.eta, raw.hbar)
    }
}

impl From<NcParams> for NcParamsRaw {
    fn from(nc: NcParams) -> Self {
        NcParamsRaw { theta: nc.theta, eta: nc.eta, hbar: nc.hbar }
    }
}

impl NcParams {
    /// Validates `0 ≤ θ ≤ ħ`, `0 ≤ η ≤ ħ`, `ħ > 0`.
    pub fn new(theta: f64, eta: f64, hbar: f64) -> Result<Self> {
        let hbar_e = effective_planck(theta, eta, hbar)?;
        if theta > hbar || eta > hbar {
            return Err(Error::Domain(format!(
                "noncommutativity must not exceed hbar: theta={theta}, eta={eta}, hbar={hbar}"
            )));
        }
        Ok(Self { theta, eta, hbar, hbar_e })
    }

    /// Commutative space with the given ħ.
    pub fn commutative(hbar: f64) -> Result<Self> {
        Self::new(0.0, 0.0, hbar)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn hbar_e(&self) -> f64 {
        self.hbar_e
    }

    /// `Π_θη = diag(θ, η)`.
    pub fn pi(&self) -> Mat2 {
        Mat2::new(self.theta, 0.0, 0.0, self.eta)
    }

    /// Determinant of the Schur complement `(1 − θη/4ħ²)²`.
    pub fn schur_determinant(&self) -> f64 {
        let s = 1.0 - self.theta * self.eta / (4.0 * self.hbar * self.hbar);
        s * s
    }
}

/// `ħ_e = ħ·(1 + θη/4ħ²)`.
pub fn effective_planck(theta: f64, eta: f64, hbar: f64) -> Result<f64> {
    ensure_finite("theta", theta)?;
    ensure_finite("eta", eta)?;
    ensure_finite("hbar", hbar)?;
    if hbar <= 0.0 {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    if theta < 0.0 || eta < 0.0 {
        return Err(Error::Domain(format!(
            "noncommutativity parameters must be non-negative: theta={theta}, eta={eta}"
        )));
    }
    Ok(hbar * (1.0 + theta * eta / (4.0 * hbar * hbar)))
}

/// `J = diag(J₂, J₂)`.
pub fn standard_symplectic() -> Mat4 {
    from_blocks(&j2(), &Mat2::zeros(), &Mat2::zeros(), &j2())
}

/// Deformed form `J̃` encoding `[X̃_α, X̃_β] = iħ_e J̃_αβ`.
pub fn deformed_symplectic(nc: &NcParams) -> Mat4 {
    let off = nc.pi() / nc.hbar_e();
    from_blocks(&j2(), &off, &(-off), &j2())
}

/// `(1/2ħ)·Π_θη·J₂`, the off-diagonal generator of the Bopp shift.
fn shift_block(nc: &NcParams) -> Mat2 {
    nc.pi() * j2() / (2.0 * nc.hbar())
}

/// The Bopp shift `Υ_D` with `X̃ = Υ_D·X`.
///
/// Row-wise: `x̃₁ = x₁ − (θ/2ħ)p₂`, `p̃₁ = p₁ + (η/2ħ)x₂`,
/// `x̃₂ = x₂ + (θ/2ħ)p₁`, `p̃₂ = p₂ − (η/2ħ)x₁`.
pub fn bopp_shift(nc: &NcParams) -> Mat4 {
    let b = shift_block(nc);
    from_blocks(&Mat2::identity(), &(-b), &b, &Mat2::identity())
}

/// `Υ_D⁻¹` from the Schur-complement closed form.
pub fn bopp_shift_inverse(nc: &NcParams) -> Result<Mat4> {
    let det = nc.schur_determinant();
    if det < SINGULAR_THRESHOLD {
        return Err(Error::Singular(det));
    }
    let b = shift_block(nc);
    Ok(from_blocks(&Mat2::identity(), &b, &(-b), &Mat2::identity()) / det.sqrt())
}

/// `‖ħ_e·J̃ − ħ·Υ_D·J·Υ_Dᵀ‖∞`; zero up to rounding for every valid input.
pub fn symplectic_correspondence_residual(nc: &NcParams) -> f64 {
    let u = bopp_shift(nc);
    let lhs = deformed_symplectic(nc) * nc.hbar_e();
    let rhs = u * standard_symplectic() * u.transpose() * nc.hbar();
    max_abs(&(lhs - rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(t: f64, e: f64) -> NcParams {
        NcParams::new(t, e, 1.0).unwrap()
    }

    #[test]
    fn effective_planck_examples() {
        assert_eq!(effective_planck(0.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(effective_planck(1.0, 1.0, 1.0).unwrap(), 1.25);
        assert_eq!(effective_planck(0.5, 0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn effective_planck_rejects_bad_input() {
        assert!(effective_planck(-0.1, 0.0, 1.0).is_err());
        assert!(effective_planck(0.1, f64::NAN, 1.0).is_err());
        assert!(effective_planck(0.1, 0.1, 0.0).is_err());
        assert!(effective_planck(0.1, 0.1, f64::INFINITY).is_err());
        assert!(NcParams::new(1.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn standard_form_layout() {
        let j = standard_symplectic();
        let mut expect = Mat4::zeros();
        expect[(0, 1)] = 1.0;
        expect[(1, 0)] = -1.0;
        expect[(2, 3)] = 1.0;
        expect[(3, 2)] = -1.0;
        assert_eq!(j, expect);
        assert_eq!(j * j, -Mat4::identity());
        assert_eq!(j.transpose(), -j);
    }

    #[test]
    fn deformed_form_examples() {
        assert_eq!(deformed_symplectic(&nc(0.0, 0.0)), standard_symplectic());
        let d = deformed_symplectic(&nc(1.0, 0.0));
        assert_eq!(d[(0, 2)], 1.0);
        assert_eq!(d[(2, 0)], -1.0);
        assert_eq!(d[(1, 3)], 0.0);
        assert_eq!(d[(3, 1)], 0.0);
        let d = deformed_symplectic(&nc(0.7, 0.3));
        assert_eq!(d.transpose(), -d);
    }

    #[test]
    fn bopp_shift_examples() {
        assert_eq!(bopp_shift(&nc(0.0, 0.0)), Mat4::identity());
        // Hand product: (1/2)·diag(0.5, 0)·J₂ = [[0, 0.25], [0, 0]].
        let u = bopp_shift(&nc(0.5, 0.0));
        assert_eq!(u.row(0).into_owned(), nalgebra::RowVector4::new(1.0, 0.0, 0.0, -0.25));
        assert_eq!(u.row(1).into_owned(), nalgebra::RowVector4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(u[(2, 1)], 0.25);
    }

    #[test]
    fn bopp_shift_determinant_at_boundary() {
        let p = nc(1.0, 1.0);
        assert_eq!(p.schur_determinant(), 9.0 / 16.0);
        assert!((bopp_shift(&p).determinant() - 9.0 / 16.0).abs() < 1e-15);
        let inv = bopp_shift_inverse(&p).unwrap();
        assert!((inv[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_matches_numeric_inverse() {
        for &(t, e) in &[(0.0, 0.0), (0.3, 0.9), (1.0, 1.0), (0.01, 0.5)] {
            let p = nc(t, e);
            let u = bopp_shift(&p);
            let inv = bopp_shift_inverse(&p).unwrap();
            assert!(max_abs(&(inv * u - Mat4::identity())) < 1e-14);
            assert!(max_abs(&(inv - u.try_inverse().unwrap())) < 1e-12);
        }
        assert_eq!(bopp_shift_inverse(&nc(0.0, 0.0)).unwrap(), Mat4::identity());
    }

    #[test]
    fn correspondence_identity() {
        assert_eq!(symplectic_correspondence_residual(&nc(0.0, 0.0)), 0.0);
        assert!(symplectic_correspondence_residual(&nc(1.0, 0.5)) < 1e-13);
        let p = NcParams::new(0.8, 1.7, 2.0).unwrap();
        assert!(symplectic_correspondence_residual(&p) < 1e-13);
    }

    #[test]
    fn serde_round_trip_recomputes_hbar_e() {
        let json = r#"{"theta": 1.0, "eta": 1.0}"#;
        let p: NcParams = serde_json::from_str(json).unwrap();
        assert_eq!(p.hbar_e(), 1.25);
        assert!(serde_json::from_str::<NcParams>(r#"{"theta": 2.0, "eta": 0.0}"#).is_err());
    }
}
