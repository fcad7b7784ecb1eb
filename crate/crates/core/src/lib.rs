// SPDX-License-Identifier: MIT OR Apache-2.0

//! Complex dispersion spectra of bi-phase periodic thermoelastic layered media.
//!
//! The crate models a periodic stack of two perfectly bonded orthotropic
//! layers under Green-Lindsay thermoelasticity (two relaxation times) and
//! computes frequency versus complex wavenumber curves for waves travelling
//! normal to the layers by three methods:
//!
//! * `hom0`: zeroth-order (Cauchy) homogenization,
//! * `hom2`: second-order non-local homogenization built from cell problems
//!   solved exactly in piecewise-polynomial form,
//! * `fb`: the exact Floquet-Bloch transfer-matrix spectrum.
//!
//! Module map:
//!
//! * [`material`]: phase constants, the layered cell and dimensionless groups.
//! * [`piecewise`]: exact per-layer polynomial algebra on the unit cell.
//! * [`cell_problems`]: recursive cell problems and perturbation functions.
//! * [`effective`]: averaged coefficients of the macroscopic equations.
//! * [`homogenized`]: macroscopic matrix polynomials and their roots.
//! * [`floquet_bloch`]: layer state matrices and the transfer matrix.
//! * [`toolkit`]: sweeps, branch tracking, folding and method comparison.
//! * [`linalg`], [`expm`]: dense complex eigenvalues, characteristic
//!   polynomials, polynomial roots and the matrix exponential.
//! * [`config`], [`svg`]: run configuration files and plot output.

pub mod cell_problems;
pub mod config;
pub mod effective;
pub mod error;
pub mod expm;
pub mod floquet_bloch;
pub mod homogenized;
pub mod linalg;
pub mod material;
pub mod piecewise;
pub mod svg;
pub mod toolkit;

pub use cell_problems::{Block, PerturbationSet};
pub use effective::EffectiveTensors;
pub use error::{Error, Result};
pub use material::{DimensionlessGroups, LayeredCell, PhaseProperties, Theory};
pub use piecewise::{PiecewisePoly, Poly};

/// Complex scalar used by every spectral routine.
pub type C64 = num_complex::Complex64;

/// Imaginary unit. The time convention is fixed once for the whole crate:
/// the Laplace variable is `s = ι·ω` and fields vary as `exp(ι k x₂)`.
pub const I: C64 = C64::new(0.0, 1.0);

/// Laplace variable `s = ιω` for a real angular frequency.
pub fn laplace(omega: f64) -> C64 {
    I * omega
}
