//! Numerical laboratory for spectral dimensions and quantum transport of
//! one-dimensional pure-point operators: point spectral measures and their
//! generalized fractal dimensions, tridiagonal eigensolving, exact
//! time-averaged transport moments, weakly-spaced eigenvalue witnesses, and
//! explicit vector constructions with prescribed dimension/transport
//! behavior.

// `!(x > 0.0)` style guards are used throughout on purpose: unlike
// `x <= 0.0` they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod construct;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod measure;
pub mod run;
pub mod scaling;
pub mod spacing;
pub mod spectral;

pub use error::{Error, Result};
