//! Small dense/banded kernels shared by the radial, strip and spectral solvers.

mod banded;
mod cg;
mod eig;
pub mod quad;

pub use banded::{LdlFactor, SymBanded};
pub use cg::{pcg, CgOutcome};
pub use eig::{Eigenpair, Pencil};

/// Euclidean dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dot product weighted by a positive diagonal.
pub fn wdot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
