//! Small fixed-size matrix helpers.
//!
//! Every 4×4 matrix in this crate is indexed over the phase-space vector
//! `(x₁, p₁, x₂, p₂)`. The 2×2 blocks are per-mode: `[0..2]` is mode 1,
//! `[2..4]` is mode 2.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type Mat2 = Matrix2<f64>;
pub type Mat4 = Matrix4<f64>;
pub type CMat4 = Matrix4<Complex64>;

/// `J₂ = [[0, 1], [-1, 0]]`.
pub fn j2() -> Mat2 {
    Mat2::new(0.0, 1.0, -1.0, 0.0)
}

/// `Σ_y = diag(σ_y, σ_y)`.
pub fn sigma_y() -> CMat4 {
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    CMat4::new(
        z, -i, z, z, //
        i, z, z, z, //
        z, z, z, -i, //
        z, z, i, z,
    )
}

/// `Σ_z = diag(σ_z, σ_z)`.
pub fn sigma_z() -> CMat4 {
    CMat4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, -1.0).map(Complex64::from))
}

pub fn block(m: &Mat4, row: usize, col: usize) -> Mat2 {
    m.fixed_view::<2, 2>(2 * row, 2 * col).into_owned()
}

pub fn from_blocks(b11: &Mat2, b12: &Mat2, b21: &Mat2, b22: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(b11);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b12);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(b21);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b22);
    m
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_c(m: &CMat4) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

pub fn to_complex(m: &Mat4) -> CMat4 {
    m.map(Complex64::from)
}

pub fn all_finite(m: &Mat4) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// Smallest eigenvalue of a Hermitian 4×4 matrix.
pub fn hermitian_min_eigenvalue(m: &CMat4) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(*m);
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Error-free product: returns `(p, e)` with `a·b = p + e` exactly.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum (Knuth): returns `(s, e)` with `a + b = s + e` exactly.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated Horner evaluation of `Σ coeffs[k]·x^k`.
///
/// Accurate to roughly twice working precision, which matters when the
/// coefficients are large and the value sits near a root.
pub fn compensated_horner(coeffs: &[f64], x: f64) -> f64 {
    let Some((&last, rest)) = coeffs.split_last() else {
        return 0.0;
    };
    let mut s = last;
    let mut c = 0.0;
    for &a in rest.iter().rev() {
        let (p, pi) = two_prod(s, x);
        let (t, sigma) = two_sum(p, a);
        s = t;
        c = c * x + (pi + sigma);
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_round_trip() {
        let m = Mat4::from_fn(|i, j| (4 * i + j) as f64);
        let r = from_blocks(&block(&m, 0, 0), &block(&m, 0, 1), &block(&m, 1, 0), &block(&m, 1, 1));
        assert_eq!(m, r);
        assert_eq!(block(&m, 0, 1), Mat2::new(2.0, 3.0, 6.0, 7.0));
    }

    #[test]
    fn sigma_y_is_minus_i_j() {
        let j = from_blocks(&j2(), &Mat2::zeros(), &Mat2::zeros(), &j2());
        let expect = to_complex(&j) * Complex64::new(0.0, -1.0);
        assert!(max_abs_c(&(sigma_y() - expect)) == 0.0);
    }

    #[test]
    fn horner_matches_naive_on_small_polynomial() {
        let c = [1.0, -3.0, 0.5, 2.0];
        for &x in &[-2.0_f64, 0.0, 0.3, 7.0] {
            let naive: f64 = c.iter().enumerate().map(|(k, a)| a * x.powi(k as i32)).sum();
            assert!((compensated_horner(&c, x) - naive).abs() < 1e-12 * (1.0 + naive.abs()));
        }
    }

    #[test]
    fn horner_recovers_cancellation() {
        // (x - 1)^7 expanded, evaluated just off the root.
        let c = [-1.0, 7.0, -21.0, 35.0, -35.0, 21.0, -7.0, 1.0];
        let x = 1.0 + 1e-3;
        let exact = 1e-21;
        let got = compensated_horner(&c, x);
        assert!((got - exact).abs() < 1e-26, "{got}");
    }

    #[test]
    fn hermitian_min_eig_of_diag() {
        let m = to_complex(&Mat4::from_diagonal(&nalgebra::Vector4::new(3.0, -1.0, 2.0, 0.5)));
        assert!((hermitian_min_eigenvalue(&m) + 1.0).abs() < 1e-14);
    }
}
