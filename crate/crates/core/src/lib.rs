//! Numerical toolkit for the six-component photon spinor of Darwin's equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`] builds the fixed 6×6 matrices Γ0, Γ, Σ and Ω in exact
//!   Gaussian-integer arithmetic and checks their identities.
//! * [`modes`] represents momentum-space photon states as weighted lists of
//!   helicity plane-wave modes that satisfy the relativistic condition by
//!   construction.
//! * [`observables`] evaluates probability, energy, the three spin
//!   expectation forms, orbital angular momentum and the density variants.
//! * [`fields`] holds gridded position/momentum fields, the unitary 3-D
//!   transform, classical-field correspondence and the spectral Maxwell
//!   cross-check.
//! * [`lorentz`] implements the x1-axis spinor boost and covariance residuals.
//! * [`cli`] is the scenario runner behind the `photon-spinor` binary.

// NaN must fail the `!(x > 0.0)` style guards, and index loops mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod fields;
pub mod lorentz;
pub mod modes;
pub mod numeric;
pub mod observables;
pub mod units;
pub mod vector;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use units::Units;
