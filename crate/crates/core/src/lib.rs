//! Numerics for the monodromy problem of the cubic oscillator
//! `psi'' = (4 lambda^3 - a lambda - b) psi`.
//!
//! Two independent routes to the same data live here:
//!
//! * [`tba`] solves the five coupled nonlinear integral equations (the
//!   deformed TBA) for the pseudo-energies and reconstructs the Y-functions
//!   on the fundamental strip.
//! * [`oracle`] integrates the ODE along the Stokes rays, extracts Stokes
//!   multipliers from Wronskians and asymptotic values from Wronskian ratios.
//!
//! [`geometry`] holds the projective machinery (cross ratios on five points
//! of the sphere), [`crosscheck`] ties the two routes together and [`io`]
//! owns the persistent formats used by the `dtba` binary.

// `!(x >= y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crosscheck;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod tba;
mod z5;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use z5::{Z5, Z5_ALL};
