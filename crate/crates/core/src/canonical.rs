//! Commutative-frame Hamiltonian, its normal frequencies and the
//! symplectically normalized normal-mode matrix `Q`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{from_blocks, max_abs, max_abs_c, sigma_y, sigma_z, to_complex, CMat4, Mat2, Mat4};
use crate::symplectic::{standard_symplectic, NcParams};

/// Slack on `c` and `Δ` before a negative value becomes an error.
pub const CLAMP_TOL: f64 = 1e-10;
/// Relative gap below which the two normal frequencies count as equal.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// `ν₁ν₂` below which the modes are treated as decoupled.
pub const DECOUPLED_TOL: f64 = 1e-14;

/// Instantaneous masses and bare frequencies `ω̃ⱼ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorParams {
    pub m1: f64,
    pub m2: f64,
    pub w1: f64,
    pub w2: f64,
}

impl OscillatorParams {
    pub fn new(m1: f64, m2: f64, w1: f64, w2: f64) -> Result<Self> {
        for (name, v) in [("m1", m1), ("m2", m2), ("w1", w1), ("w2", w2)] {
            ensure_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { m1, m2, w1, w2 })
    }
}

/// Drive amplitudes `𝓔₁, 𝓔₂`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Drives {
    pub e1: f64,
    pub e2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub mu1: f64,
    pub mu2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// `ω₁² = α₁/μ₁`
    pub w_eff1_sq: f64,
    /// `ω₂² = α₂/μ₂`
    pub w_eff2_sq: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub hbar: f64,
    /// How many of `c`, `Δ` were clamped up to zero.
    pub clamped: u8,
}

/// `μⱼ, αⱼ, νⱼ` and the characteristic polynomial `λ⁴ + bλ² + c` of `Ω`.
///
/// `c` and `Δ = b² − 4c` are evaluated from sums of non-negative terms so
/// they stay accurate when the two normal frequencies nearly coincide.
pub fn derived_params(osc: &OscillatorParams, nc: &NcParams) -> Result<DerivedParams> {
    let OscillatorParams { m1, m2, w1, w2 } = *osc;
    let (th, et, hb) = (nc.theta(), nc.eta(), nc.hbar());
    let h2 = hb * hb;
    let (w1s, w2s) = (w1 * w1, w2 * w2);

    let mu1 = 1.0 / (1.0 / m1 + th * th / (4.0 * h2) * m2 * w2s);
    let mu2 = 1.0 / (1.0 / m2 + th * th / (4.0 * h2) * m1 * w1s);
    let alpha1 = m1 * w1s + et * et / (4.0 * h2 * m2);
    let alpha2 = m2 * w2s + et * et / (4.0 * h2 * m1);
    let nu1 = (et + m1 * m2 * th * w2s) / (4.0 * hb * m1);
    let nu2 = (et + m1 * m2 * th * w1s) / (4.0 * hb * m2);
    let w_eff1_sq = alpha1 / mu1;
    let w_eff2_sq = alpha2 / mu2;

    // F₁ = α₁/μ₂ − 4ν₂² and F₂ = α₂/μ₁ − 4ν₁² collapse to these products.
    let s2 = (1.0 - th * et / (4.0 * h2)).powi(2);
    let f1 = m1 * w1s / m2 * s2;
    let f2 = m2 * w2s / m1 * s2;

    let a = mu2 * f1 / mu1;
    let bb = mu1 * f2 / mu2;
    let k = 4.0 * (mu1 * nu1 + mu2 * nu2).powi(2) / (mu1 * mu2);
    let b = a + bb + k;
    let mut c = f1 * f2;
    let mut delta = (a - bb).powi(2) + 2.0 * k * (a + bb) + k * k;

    let mut clamped = 0;
    for v in [&mut c, &mut delta] {
        if *v < 0.0 {
            if *v < -CLAMP_TOL {
                return Err(Error::Consistency(format!("negative polynomial coefficient {v:e}")));
            }
            *v = 0.0;
            clamped += 1;
        }
    }
    let dp = DerivedParams {
        mu1,
        mu2,
        alpha1,
        alpha2,
        nu1,
        nu2,
        w_eff1_sq,
        w_eff2_sq,
        b,
        c,
        delta,
        hbar: hb,
        clamped,
    };
    for v in [mu1, mu2, alpha1, alpha2, nu1, nu2, b, c, delta] {
        ensure_finite("derived parameter", v)?;
    }
    Ok(dp)
}

/// Independent evaluations of `b` and `c` used as a consistency check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolynomialCheck {
    /// `ω₁² + ω₂² + 8ν₁ν₂`
    pub b_direct: f64,
    /// `ω₁² + ω₂² + 6ν₁ν₂`, which differs from the true coefficient when `ν₁ν₂ ≠ 0`.
    pub b_six: f64,
    /// `α₀ω_x² + ω_y²/α₀ + 4ν₁ν₂(√α₀ + 1/√α₀)²`, when `ν₁ν₂ > 0`.
    pub b_alternate: Option<f64>,
    /// `ω₁²ω₂² + 16ν₁²ν₂² − 4ν₁²ω₁²μ₁/μ₂ − 4ν₂²ω₂²μ₂/μ₁`
    pub c_expanded: f64,
    /// `16ν₁²ν₂²(μ₁ω₁²/4μ₂ν₂² − 1)(μ₂ω₂²/4μ₁ν₁² − 1)`, when `ν₁ν₂ > 0`.
    pub c_factorized: Option<f64>,
    /// `ω_x²ω_y²`, when `ν₁ν₂ > 0`.
    pub c_alternate: Option<f64>,
    /// `−tr(Ω²)/2`
    pub b_trace: f64,
    /// `det Ω`
    pub c_det: f64,
}

pub fn polynomial_check(dp: &DerivedParams) -> PolynomialCheck {
    let (o1, o2) = (dp.w_eff1_sq, dp.w_eff2_sq);
    let (n1, n2, mu1, mu2) = (dp.nu1, dp.nu2, dp.mu1, dp.mu2);
    let nn = n1 * n2;
    let c_expanded = o1 * o2 + 16.0 * nn * nn - 4.0 * n1 * n1 * o1 * mu1 / mu2 - 4.0 * n2 * n2 * o2 * mu2 / mu1;
    let (b_alternate, c_factorized, c_alternate) = if nn > 0.0 {
        let r1 = mu1 * o1 / (4.0 * mu2 * n2 * n2);
        let r2 = mu2 * o2 / (4.0 * mu1 * n1 * n1);
        let wx = 4.0 * nn * (r1 - 1.0);
        let wy = 4.0 * nn * (r2 - 1.0);
        let a0 = mu2 * n2 / (mu1 * n1);
        let s = a0.sqrt() + 1.0 / a0.sqrt();
        (
            Some(a0 * wx + wy / a0 + 4.0 * nn * s * s),
            Some(16.0 * nn * nn * (r1 - 1.0) * (r2 - 1.0)),
            Some(wx * wy),
        )
    } else {
        (None, None, None)
    };
    let om = build_omega(&build_hamiltonian(dp, &Drives::default(), None).0);
    PolynomialCheck {
        b_direct: o1 + o2 + 8.0 * nn,
        b_six: o1 + o2 + 6.0 * nn,
        b_alternate,
        c_expanded,
        c_factorized,
        c_alternate,
        b_trace: -(om * om).trace() / 2.0,
        c_det: om.determinant(),
    }
}

/// `(μ₁ω₁²/4μ₂ν₂², μ₂ω₂²/4μ₁ν₁²)`, both at least 1; `None` when decoupled.
pub fn ratio_bounds(dp: &DerivedParams) -> Option<(f64, f64)> {
    if dp.nu1 * dp.nu2 > 0.0 {
        Some((
            dp.alpha1 / (4.0 * dp.mu2 * dp.nu2 * dp.nu2),
            dp.alpha2 / (4.0 * dp.mu1 * dp.nu1 * dp.nu1),
        ))
    } else {
        None
    }
}

/// Bopp-shifted drive vector `(𝓔₁, (θ/2ħ)𝓔₂, 𝓔₂, −(θ/2ħ)𝓔₁)`.
pub fn drive_vector(drives: &Drives, nc: &NcParams) -> nalgebra::Vector4<f64> {
    let a = nc.theta() / (2.0 * nc.hbar());
    nalgebra::Vector4::new(drives.e1, a * drives.e2, drives.e2, -a * drives.e1)
}

/// Quadratic form `H` (blocks `Ĉ`, `Âᵀ`, `Â`, `B̂`) and drive vector `E`.
pub fn build_hamiltonian(dp: &DerivedParams, drives: &Drives, nc: Option<&NcParams>) -> (Mat4, nalgebra::Vector4<f64>) {
    let c = Mat2::new(dp.alpha1, 0.0, 0.0, 1.0 / dp.mu1);
    let b = Mat2::new(dp.alpha2, 0.0, 0.0, 1.0 / dp.mu2);
    let a = Mat2::new(0.0, 2.0 * dp.nu1, -2.0 * dp.nu2, 0.0);
    let h = from_blocks(&c, &a.transpose(), &a, &b);
    let e = match nc {
        Some(nc) => drive_vector(drives, nc),
        None => nalgebra::Vector4::new(drives.e1, 0.0, drives.e2, 0.0),
    };
    (h, e)
}

/// `Ω = J·H`.
pub fn build_omega(h: &Mat4) -> Mat4 {
    standard_symplectic() * h
}

/// `(λ₁, λ₂)` with `λ₁ ≥ λ₂ ≥ 0`.
pub fn normal_frequencies(dp: &DerivedParams) -> Result<(f64, f64)> {
    if dp.b <= 0.0 {
        return Err(Error::Consistency(format!("b = {} is not positive", dp.b)));
    }
    let s = dp.b + dp.delta.sqrt();
    let l1 = (s / 2.0).sqrt();
    let l2 = (2.0 * dp.c / s).sqrt();
    Ok((l1, l2))
}

/// Which closed form produced a set of γ coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaForm {
    /// Built around `λ² − ω₂²`.
    Primary,
    /// Built around `λ² − ω₁²`; same eigenvector, better when `λ ≈ ω₂`.
    Alternate,
    /// Independent single-mode vectors for the uncoupled, degenerate case.
    Decoupled,
}

/// `(γ₁, γ₂, γ₃, γ₄)` of the left eigenvector `u = (−iγ₁, γ₂, γ₃, iγ₄)` with
/// `uΩ = −iλu`, before normalization.
pub fn eigenvector_gammas(dp: &DerivedParams, lambda: f64) -> [f64; 4] {
    let (mu1, mu2, n1, n2, o2) = (dp.mu1, dp.mu2, dp.nu1, dp.nu2, dp.w_eff2_sq);
    let l2 = lambda * lambda;
    [
        lambda * mu1 * mu2 * (l2 - o2 - 4.0 * n1 * n2),
        mu2 * (l2 - o2) + 4.0 * mu1 * n1 * n1,
        2.0 * mu1 * mu2 * n1 * (l2 - 4.0 * n1 * n2) + 2.0 * n2 * mu2 * mu2 * o2,
        2.0 * lambda * (mu1 * n1 + mu2 * n2),
    ]
}

pub fn eigenvector_gammas_alternate(dp: &DerivedParams, lambda: f64) -> [f64; 4] {
    let (mu1, mu2, n1, n2, o1) = (dp.mu1, dp.mu2, dp.nu1, dp.nu2, dp.w_eff1_sq);
    let g2 = 2.0 * lambda * (mu1 * n1 + mu2 * n2);
    let g4 = mu1 * (lambda * lambda - o1) + 4.0 * mu2 * n2 * n2;
    [mu1 * (lambda * g2 - 2.0 * n1 * g4), g2, mu2 * (lambda * g4 - 2.0 * n2 * g2), g4]
}

/// Left eigenvector as a complex row.
pub fn left_vector(g: &[f64; 4]) -> nalgebra::RowVector4<Complex64> {
    nalgebra::RowVector4::new(
        Complex64::new(0.0, -g[0]),
        Complex64::new(g[1], 0.0),
        Complex64::new(g[2], 0.0),
        Complex64::new(0.0, g[3]),
    )
}

/// Right eigenvector `ħ(iγ₂, γ₁, γ₄, −iγ₃)` paired with [`left_vector`].
pub fn right_vector(g: &[f64; 4], hbar: f64) -> nalgebra::Vector4<Complex64> {
    nalgebra::Vector4::new(
        Complex64::new(0.0, hbar * g[1]),
        Complex64::new(hbar * g[0], 0.0),
        Complex64::new(hbar * g[3], 0.0),
        Complex64::new(0.0, -hbar * g[2]),
    )
}

/// `‖uΩ + iλu‖∞ / ‖u‖∞`.
pub fn eigen_residual(omega: &Mat4, g: &[f64; 4], lambda: f64) -> f64 {
    let u = left_vector(g);
    let r = u * to_complex(omega) + u * Complex64::new(0.0, lambda);
    let norm = u.iter().fold(0.0_f64, |a, v| a.max(v.norm()));
    r.iter().fold(0.0_f64, |a, v| a.max(v.norm())) / norm.max(f64::MIN_POSITIVE)
}

/// Normalization constant `k` with `k² = 2ħ(γ₁γ₂ + γ₃γ₄)`.
pub fn normalization(g: &[f64; 4], hbar: f64) -> Result<f64> {
    let k2 = 2.0 * hbar * (g[0] * g[1] + g[2] * g[3]);
    if !(k2 > 0.0) || !k2.is_finite() {
        return Err(Error::DegenerateMode(format!("symplectic norm {k2:e} is not positive")));
    }
    Ok(k2.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalMode {
    pub lambda: f64,
    /// Unnormalized γ from the selected closed form.
    pub gamma: [f64; 4],
    pub k: f64,
    pub form: GammaForm,
}

impl NormalMode {
    /// `γ/k`.
    pub fn normalized(&self) -> [f64; 4] {
        self.gamma.map(|g| g / self.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeDecomposition {
    pub modes: [NormalMode; 2],
    pub q: CMat4,
    pub qinv: CMat4,
    pub hbar: f64,
}

impl NormalModeDecomposition {
    pub fn lambda1(&self) -> f64 {
        self.modes[0].lambda
    }
    pub fn lambda2(&self) -> f64 {
        self.modes[1].lambda
    }

    /// `‖Q⁻¹ΩQ − diag(−iλ₁, iλ₁, −iλ₂, iλ₂)‖∞`.
    pub fn diagonalization_residual(&self, omega: &Mat4) -> f64 {
        let (l1, l2) = (self.lambda1(), self.lambda2());
        let d = nalgebra::Vector4::new(
            Complex64::new(0.0, -l1),
            Complex64::new(0.0, l1),
            Complex64::new(0.0, -l2),
            Complex64::new(0.0, l2),
        );
        max_abs_c(&(self.qinv * to_complex(omega) * self.q - CMat4::from_diagonal(&d)))
    }

    /// `‖Q† + ħΣ_zQ⁻¹Σ_y‖∞`.
    pub fn adjoint_residual(&self) -> f64 {
        let rhs = sigma_z() * self.qinv * sigma_y() * Complex64::from(self.hbar);
        max_abs_c(&(self.q.adjoint() + rhs))
    }

    /// `‖Q⁻¹J(Q⁻¹)ᵀ − Σ_y/ħ‖∞`.
    pub fn commutator_residual(&self) -> f64 {
        let j = to_complex(&standard_symplectic());
        max_abs_c(&(self.qinv * j * self.qinv.transpose() - sigma_y() / Complex64::from(self.hbar)))
    }

    /// `‖Q⁻¹Q − I‖∞`.
    pub fn inverse_residual(&self) -> f64 {
        max_abs_c(&(self.qinv * self.q - CMat4::identity()))
    }
}

fn assemble(modes: [NormalMode; 2], hbar: f64) -> NormalModeDecomposition {
    let mut q = CMat4::zeros();
    let mut qinv = CMat4::zeros();
    for (j, m) in modes.iter().enumerate() {
        let g = m.normalized();
        let v = right_vector(&g, hbar);
        let u = left_vector(&g);
        q.set_column(2 * j, &v);
        q.set_column(2 * j + 1, &v.map(|z| z.conj()));
        qinv.set_row(2 * j, &u);
        qinv.set_row(2 * j + 1, &u.map(|z| z.conj()));
    }
    NormalModeDecomposition { modes, q, qinv, hbar }
}

fn canonical_sign(mut g: [f64; 4]) -> [f64; 4] {
    let scale = g.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let lead = if g[1].abs() > 1e-12 * scale { g[1] } else { g[3] };
    if lead < 0.0 {
        g = g.map(|v| -v);
    }
    g
}

fn coupled_mode(dp: &DerivedParams, omega: &Mat4, lambda: f64) -> Option<NormalMode> {
    let mut best: Option<(f64, NormalMode)> = None;
    for (form, g) in [
        (GammaForm::Primary, eigenvector_gammas(dp, lambda)),
        (GammaForm::Alternate, eigenvector_gammas_alternate(dp, lambda)),
    ] {
        let Ok(k) = normalization(&g, dp.hbar) else { continue };
        let res = eigen_residual(omega, &g, lambda);
        if !res.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, NormalMode { lambda, gamma: canonical_sign(g), k, form }));
        }
    }
    best.map(|(_, m)| m)
}

fn decoupled_modes(dp: &DerivedParams) -> Result<[NormalMode; 2]> {
    let l_a = dp.w_eff1_sq.sqrt();
    let l_b = dp.w_eff2_sq.sqrt();
    let ga = [l_a * dp.mu1, 1.0, 0.0, 0.0];
    let gb = [0.0, 0.0, l_b * dp.mu2, 1.0];
    let ma = NormalMode { lambda: l_a, gamma: ga, k: normalization(&ga, dp.hbar)?, form: GammaForm::Decoupled };
    let mb = NormalMode { lambda: l_b, gamma: gb, k: normalization(&gb, dp.hbar)?, form: GammaForm::Decoupled };
    Ok(if l_a >= l_b { [ma, mb] } else { [mb, ma] })
}

/// Builds `Q = (v₁, v₁*, v₂, v₂*)` and `Q⁻¹ = (u₁; u₁*; u₂; u₂*)`.
pub fn build_q(dp: &DerivedParams) -> Result<NormalModeDecomposition> {
    let (l1, l2) = normal_frequencies(dp)?;
    let decoupled = dp.nu1 * dp.nu2 < DECOUPLED_TOL;
    if (l1 - l2).abs() < DEGENERACY_TOL * l1 {
        if decoupled {
            return Ok(assemble(decoupled_modes(dp)?, dp.hbar));
        }
        return Err(Error::DegenerateMode(format!(
            "coupled system with coincident normal frequencies λ₁ = {l1}, λ₂ = {l2}"
        )));
    }
    let omega = build_omega(&build_hamiltonian(dp, &Drives::default(), None).0);
    match (coupled_mode(dp, &omega, l1), coupled_mode(dp, &omega, l2)) {
        (Some(a), Some(b)) => Ok(assemble([a, b], dp.hbar)),
        _ if decoupled => Ok(assemble(decoupled_modes(dp)?, dp.hbar)),
        _ => Err(Error::DegenerateMode("eigenvector closed forms vanish".into())),
    }
}

/// Coefficients of `a_j†` in the linear part, `f_j = Eᵀ·v_j*`, and the
/// zero-point shift `g = (λ₁ + λ₂)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveTerms {
    pub f1: Complex64,
    pub f2: Complex64,
    pub g: f64,
}

/// `fⱼ = (ħ/kⱼ)[𝓔₂(γⱼ₄ + (θ/2ħ)γⱼ₁) − i𝓔₁(γⱼ₂ + (θ/2ħ)γⱼ₃)]`.
pub fn drive_terms(nm: &NormalModeDecomposition, drives: &Drives, nc: &NcParams) -> DriveTerms {
    let a = nc.theta() / (2.0 * nc.hbar());
    let f = |m: &NormalMode| {
        let g = m.normalized();
        Complex64::new(drives.e2 * (g[3] + a * g[0]), -drives.e1 * (g[1] + a * g[2])) * nc.hbar()
    };
    DriveTerms {
        f1: f(&nm.modes[0]),
        f2: f(&nm.modes[1]),
        g: 0.5 * (nm.lambda1() + nm.lambda2()),
    }
}

/// Largest entry of `|H − Hᵀ|`; zero by construction.
pub fn hamiltonian_asymmetry(h: &Mat4) -> f64 {
    max_abs(&(h - h.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy0() -> (OscillatorParams, NcParams) {
        (OscillatorParams::new(1.0, 4.0, 1.0, 1.0).unwrap(), NcParams::new(1.0, 0.0, 1.0).unwrap())
    }

    #[test]
    fn commutative_limit_params() {
        let osc = OscillatorParams::new(2.0, 3.0, 0.5, 1.5).unwrap();
        let dp = derived_params(&osc, &NcParams::commutative(1.0).unwrap()).unwrap();
        assert_eq!((dp.mu1, dp.mu2), (2.0, 3.0));
        assert_eq!((dp.alpha1, dp.alpha2), (2.0 * 0.25, 3.0 * 2.25));
        assert_eq!((dp.nu1, dp.nu2), (0.0, 0.0));
    }

    #[test]
    fn toy_t0_params() {
        let (osc, nc) = toy0();
        let dp = derived_params(&osc, &nc).unwrap();
        assert_eq!((dp.mu1, dp.mu2), (0.5, 2.0));
        assert_eq!((dp.alpha1, dp.alpha2), (1.0, 4.0));
        assert_eq!((dp.nu1, dp.nu2), (1.0, 0.25));
        assert!((dp.c - 1.0).abs() < 1e-14);
        // tr(Ω²) oracle: b = 2 + 2 + 8·(1/4).
        assert!((dp.b - 6.0).abs() < 1e-14);
        let chk = polynomial_check(&dp);
        assert!((chk.b_trace - 6.0).abs() < 1e-13);
        assert!((chk.c_det - 1.0).abs() < 1e-13);
        assert_eq!(chk.b_six, 5.5);
        assert!((chk.b_alternate.unwrap() - 6.0).abs() < 1e-13);
        assert!((chk.c_factorized.unwrap() - 1.0).abs() < 1e-13);
        assert!((chk.c_expanded - 1.0).abs() < 1e-13);
    }

    #[test]
    fn toy_t0_frequencies() {
        let (osc, nc) = toy0();
        let dp = derived_params(&osc, &nc).unwrap();
        let (l1, l2) = normal_frequencies(&dp).unwrap();
        assert!((l1 - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        assert!((l2 - (2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!((l1 * l2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn toy_t0_hamiltonian() {
        let (osc, nc) = toy0();
        let dp = derived_params(&osc, &nc).unwrap();
        let (h, _) = build_hamiltonian(&dp, &Drives::default(), Some(&nc));
        assert_eq!(h.diagonal(), nalgebra::Vector4::new(1.0, 2.0, 4.0, 0.5));
        assert_eq!((h[(1, 2)], h[(2, 1)]), (2.0, 2.0));
        assert_eq!((h[(0, 3)], h[(3, 0)]), (-0.5, -0.5));
        assert_eq!(hamiltonian_asymmetry(&h), 0.0);
    }

    #[test]
    fn drive_vector_example() {
        let nc = NcParams::new(0.5, 0.0, 1.0).unwrap();
        let e = drive_vector(&Drives { e1: 1.0, e2: 2.0 }, &nc);
        assert_eq!(e, nalgebra::Vector4::new(1.0, 0.5, 2.0, -0.25));
    }

    #[test]
    fn unit_oscillator() {
        let dp = derived_params(&OscillatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), &NcParams::commutative(1.0).unwrap()).unwrap();
        let (h, e) = build_hamiltonian(&dp, &Drives::default(), None);
        assert_eq!(h, Mat4::identity());
        assert_eq!(e, nalgebra::Vector4::zeros());
        assert_eq!(build_omega(&h), standard_symplectic());
        assert_eq!(normal_frequencies(&dp).unwrap(), (1.0, 1.0));
        let nm = build_q(&dp).unwrap();
        assert_eq!(nm.modes[0].form, GammaForm::Decoupled);
        assert!(nm.commutator_residual() < 1e-14);
    }

    #[test]
    fn decoupled_frequencies() {
        let dp = derived_params(&OscillatorParams::new(1.0, 1.0, 1.0, 2.0).unwrap(), &NcParams::commutative(1.0).unwrap()).unwrap();
        assert_eq!(normal_frequencies(&dp).unwrap(), (2.0, 1.0));
        let g = eigenvector_gammas(&dp, 1.0);
        assert_eq!((g[2], g[3]), (0.0, 0.0));
    }

    #[test]
    fn toy_t0_gammas_are_left_eigenvectors() {
        let (osc, nc) = toy0();
        let dp = derived_params(&osc, &nc).unwrap();
        let om = build_omega(&build_hamiltonian(&dp, &Drives::default(), None).0);
        let (l1, l2) = normal_frequencies(&dp).unwrap();
        for l in [l1, l2] {
            assert!(eigen_residual(&om, &eigenvector_gammas(&dp, l), l) < 1e-12);
            assert!(eigen_residual(&om, &eigenvector_gammas_alternate(&dp, l), l) < 1e-12);
        }
        let nm = build_q(&dp).unwrap();
        assert!(nm.diagonalization_residual(&om) < 1e-12);
        assert!(nm.adjoint_residual() < 1e-12);
        assert!(nm.commutator_residual() < 1e-12);
        assert!(nm.inverse_residual() < 1e-12);
    }

    #[test]
    fn degenerate_coupled_is_rejected() {
        let mut dp = derived_params(&OscillatorParams::new(1.0, 4.0, 1.0, 1.0).unwrap(), &NcParams::new(1.0, 0.0, 1.0).unwrap()).unwrap();
        dp.b = 2.0 * dp.c.sqrt();
        dp.delta = 0.0;
        assert!(matches!(build_q(&dp), Err(Error::DegenerateMode(_))));
    }

    #[test]
    fn generic_config_needs_no_clamping() {
        let dp = derived_params(&OscillatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), &NcParams::new(0.3, 0.2, 1.0).unwrap()).unwrap();
        assert!(dp.c > 0.0 && dp.delta >= 0.0 && dp.clamped == 0);
    }
}
