//! Separability of bipartite Gaussian states of a time-dependent anisotropic
//! oscillator in noncommutative phase space.
//!
//! Phase-space vectors are ordered `(x₁, p₁, x₂, p₂)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod covariance;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod pipeline;
pub mod schedule;
pub mod separability;
pub mod symplectic;

pub use error::{Error, Result};

/// Scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
