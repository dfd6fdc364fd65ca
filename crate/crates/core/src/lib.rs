//! Least-energy solutions of `Δu - L²u + u^p = 0` on the strip `R^{N-1} x (0, 1)`
//! with Neumann boundary conditions.
//!
//! The crate computes radial ground states, the trivial (transverse-independent)
//! branch and its energy, linearized spectra, axisymmetric minimizers of the
//! Rayleigh quotient, the symmetry-breaking transition and its pitchfork
//! expansion, and the critical-exponent constants built from the instanton.

pub mod bifurcation;
pub mod config;
pub mod critical;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod params;
pub mod radial;
pub mod spectral;
pub mod strip;
pub mod validation;

pub use error::{Error, Result};
pub use grid::{GridSpec, RadialGrid, StripField, StripGrid};
pub use params::ProblemParams;
pub use radial::{RadialProfile, TrivialBranch};
