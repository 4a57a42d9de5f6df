//! Numerical certification of entanglement-of-formation additivity for pairs
//! of antisymmetric states on `C^3 (x) C^3`.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything here is a pure function of its inputs plus an explicit
//! seed; IO, CLI and file formats live in the companion `wedge-eof-cli` crate.
//!
//! Module map:
//!
//! * [`tensor`]: factored complex vectors/matrices, partial traces, spectra,
//!   entropy, Schmidt decomposition, Haar sampling.
//! * [`antisym`]: the three-dimensional antisymmetric subspace, the cofactor
//!   map and the basis-aligning local unitary.
//! * [`xi`]: the normal-form two-copy state, its reduced matrix and the
//!   trigonometric solution of its characteristic cubic.
//! * [`bounds`]: polynomial lower bounds on `-z log2 z` and the split entropy
//!   inequality for the normal-form state.
//! * [`eof`]: ensembles, optimizer-based upper/lower estimates and the
//!   two-copy additivity check.
//! * [`sample`]: seeded random states and density matrices on the
//!   antisymmetric subspace.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod antisym;
pub mod bounds;
pub mod eof;
mod error;
pub mod sample;
pub mod tensor;
pub mod xi;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Numerical tolerances shared by validity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity, PSD, trace, normalization and support checks.
    pub validity: f64,
    /// Reconstruction residuals (Schmidt, ensembles, round trips).
    pub reconstruction: f64,
    /// Eigenvalues in `[-validity, clip]` are treated as exact zeros in
    /// `x log x`.
    pub clip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            validity: 1e-10,
            reconstruction: 1e-12,
            clip: 1e-14,
        }
    }
}
