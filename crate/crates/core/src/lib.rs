//! Exact arithmetic construction of the biorthogonal rational functions of
//! q-Hahn type, the operator triplet `X`, `Y`, `Z` (with the factor `V`,
//! `Y = XV`), and machine checks of their bispectral and algebraic
//! properties.
//!
//! Everything is evaluated in exact rational arithmetic: the deformation
//! parameter `q` and the exponentials `A = q^alpha`, `B = q^beta` are
//! instantiated at rational values and every identity is checked for exact
//! equality. The single exception is the `q -> 1` convergence sweep in
//! [`wilson`], which necessarily works in floating point.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// grid and matrix code indexes several arrays by the same position
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod algebra;
pub mod brf;
pub mod error;
pub mod gevp;
pub mod linalg;
pub mod ncpoly;
pub mod operators;
pub mod qcore;
pub mod report;
pub mod wilson;

pub use crate::error::{Error, Result};
pub use crate::linalg::{GridVector, Matrix};
pub use crate::qcore::{
    format_scalar, parse_scalar, phi_series, qbracket, qpoch, validate_params, value, ExactScalar, ExponentSpec,
    QParams, ValidationReport,
};
pub use crate::report::{CheckReport, Discrepancy, Metric, Violation};
