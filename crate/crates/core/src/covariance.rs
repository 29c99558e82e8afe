//! Covariance of displaced number states built from the normal modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{eigenvector_gammas, normal_frequencies, DerivedParams, NormalModeDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{to_complex, CMat4, Mat4};
use crate::separability::CovarianceMatrix;
use crate::symplectic::{bopp_shift, NcParams};

/// Imaginary parts below this are discarded from physically real results.
pub const REALITY_TOL: f64 = 1e-12;

/// How the eigenvector coefficients are scaled before entering the moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `ħγ/k`, so the modes carry canonical ladder commutators.
    Symplectic,
    /// Raw closed-form γ with `k = 1`. This is the scaling behind the
    /// toy-model transition times and the commutative-limit formula.
    #[default]
    Unnormalized,
}

/// Column coefficients per mode, i.e. `γ` scaled as selected.
pub type ColumnGammas = [[f64; 4]; 2];

pub fn symplectic_gammas(nm: &NormalModeDecomposition) -> ColumnGammas {
    nm.modes.clone().map(|m| m.normalized().map(|g| g * nm.hbar))
}

/// Closed-form γ at `(λ₁, λ₂)` with no scaling and no degeneracy handling.
pub fn unnormalized_gammas(dp: &DerivedParams) -> Result<(f64, f64, ColumnGammas)> {
    let (l1, l2) = normal_frequencies(dp)?;
    Ok((l1, l2, [eigenvector_gammas(dp, l1), eigenvector_gammas(dp, l2)]))
}

/// Symmetrized number-state second moments `qαβ` of the commutative
/// coordinates, weighted by `2nⱼ + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticMoments {
    pub q11: f64,
    pub q12: f64,
    pub q13: f64,
    pub q14: f64,
    pub q22: f64,
    pub q23: f64,
    pub q24: f64,
    pub q33: f64,
    pub q34: f64,
    pub q44: f64,
    pub n1: u32,
    pub n2: u32,
}

impl QuadraticMoments {
    pub fn matrix(&self) -> Mat4 {
        Mat4::new(
            self.q11, self.q12, self.q13, self.q14, //
            self.q12, self.q22, self.q23, self.q24, //
            self.q13, self.q23, self.q33, self.q34, //
            self.q14, self.q24, self.q34, self.q44,
        )
    }
}

/// Column pattern `(iγ₂, γ₁, γ₄, −iγ₃)` of a normal mode.
fn column(g: &[f64; 4]) -> [Complex64; 4] {
    [
        Complex64::new(0.0, g[1]),
        Complex64::new(g[0], 0.0),
        Complex64::new(g[3], 0.0),
        Complex64::new(0.0, -g[2]),
    ]
}

pub fn q13_moments(gammas: &ColumnGammas, n1: u32, n2: u32) -> QuadraticMoments {
    let mut q = [[0.0; 4]; 4];
    for (g, n) in gammas.iter().zip([n1, n2]) {
        let w = column(g);
        let weight = 2.0 * n as f64 + 1.0;
        for a in 0..4 {
            for b in 0..4 {
                q[a][b] += weight * (w[a] * w[b].conj()).re;
            }
        }
    }
    QuadraticMoments {
        q11: q[0][0],
        q12: q[0][1],
        q13: q[0][2],
        q14: q[0][3],
        q22: q[1][1],
        q23: q[1][2],
        q24: q[1][3],
        q33: q[2][2],
        q34: q[2][3],
        q44: q[3][3],
        n1,
        n2,
    }
}

/// `Ṽ` entry by entry; the (1,2), (1,3), (2,4), (3,4) slots vanish.
pub fn nc_covariance(qm: &QuadraticMoments, nc: &NcParams) -> Result<CovarianceMatrix> {
    let a = nc.theta() / (2.0 * nc.hbar());
    let e = nc.eta() / (2.0 * nc.hbar());
    let r = nc.hbar_e() / nc.hbar();
    let QuadraticMoments { q11, q14, q22, q23, q33, q44, .. } = *qm;
    let v11 = q11 - 2.0 * a * q14 + a * a * q44;
    let v14 = r * q14 - e * q11 - a * q44;
    let v22 = q22 + 2.0 * e * q23 + e * e * q33;
    let v23 = r * q23 + a * q22 + e * q33;
    let v33 = q33 + 2.0 * a * q23 + a * a * q22;
    let v44 = q44 - 2.0 * e * q14 + e * e * q11;
    CovarianceMatrix::noncommutative(Mat4::new(
        v11, 0.0, 0.0, v14, //
        0.0, v22, v23, 0.0, //
        0.0, v23, v33, 0.0, //
        v14, 0.0, 0.0, v44,
    ))
}

/// `V₁₁ = diag(q₁₁, q₂₂)`, `V₂₂ = diag(q₃₃, q₄₄)`, `V₁₂ = antidiag(q₁₄, q₂₃)`.
pub fn commutative_blocks(qm: &QuadraticMoments) -> Result<CovarianceMatrix> {
    CovarianceMatrix::commutative(Mat4::new(
        qm.q11, 0.0, 0.0, qm.q14, //
        0.0, qm.q22, qm.q23, 0.0, //
        0.0, qm.q23, qm.q33, 0.0, //
        qm.q14, 0.0, 0.0, qm.q44,
    ))
}

fn extended(beta: (Complex64, Complex64)) -> nalgebra::Vector4<Complex64> {
    nalgebra::Vector4::new(beta.0, beta.0.conj(), beta.1, beta.1.conj())
}

fn real_part<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<Complex64, R, C>,
    what: &str,
) -> Result<nalgebra::SMatrix<f64, R, C>> {
    let scale = m.iter().fold(1.0_f64, |a, z| a.max(z.re.abs()));
    let im = m.iter().fold(0.0_f64, |a, z| a.max(z.im.abs()));
    if im > REALITY_TOL * scale {
        return Err(Error::Consistency(format!("{what} has imaginary residue {im:e}")));
    }
    Ok(m.map(|z| z.re))
}

/// `⟨X̃⟩ = Υ_D·Q·β̃` with `β̃ = (β₁, β₁*, β₂, β₂*)`.
pub fn expectation_positions(
    beta: (Complex64, Complex64),
    nm: &NormalModeDecomposition,
    nc: &NcParams,
) -> Result<nalgebra::Vector4<f64>> {
    let x = to_complex(&bopp_shift(nc)) * nm.q * extended(beta);
    real_part(&x, "first moment")
}

/// `½⟨{X̃α, X̃β}⟩ − ⟨X̃α⟩⟨X̃β⟩` for the displaced number state, evaluated
/// without assuming the displacement drops out.
pub fn covariance_via_expectations(
    beta: (Complex64, Complex64),
    nm: &NormalModeDecomposition,
    nc: &NcParams,
    n1: u32,
    n2: u32,
) -> Result<CovarianceMatrix> {
    let b = extended(beta);
    // ⟨A_j A_l⟩ with A = (a₁, a₁†, a₂, a₂†) shifted by β̃.
    let mut m: CMat4 = b * b.transpose();
    for (j, n) in [(0usize, n1), (2usize, n2)] {
        m[(j, j + 1)] += Complex64::from(n as f64 + 1.0);
        m[(j + 1, j)] += Complex64::from(n as f64);
    }
    let t = to_complex(&bopp_shift(nc)) * nm.q;
    let second = t * m * t.transpose();
    let sym = (second + second.transpose()) * Complex64::from(0.5);
    let mean = t * b;
    let cov = sym - mean * mean.transpose();
    CovarianceMatrix::noncommutative(real_part(&cov, "covariance")?)
}

/// `1/16 − ¼m₁²m₂⁴ω₁²(ω₂² − ω₁²)⁴`, the `θ, η → 0` value of Ps at `ħ = 1`.
pub fn commutative_limit_ps(m1: f64, m2: f64, w1: f64, w2: f64) -> f64 {
    let d = w2 * w2 - w1 * w1;
    1.0 / 16.0 - 0.25 * m1 * m1 * m2.powi(4) * w1 * w1 * d.powi(4)
}
