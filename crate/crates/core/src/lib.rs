//! Numerical toolkit for two-weight inequalities of the Riesz and Cauchy
//! transforms acting from a measure on the real line (or circle) into a
//! measure on the closed upper half-plane (or disk).
//!
//! Everything works on finitely atomic measures, so every constant is a
//! finite computation: the operator norm is a largest singular value, the
//! characteristic is a maximum over a finite interval family.

pub mod constants;
pub mod corona;
pub mod disk;
pub mod dyadic;
pub mod error;
pub mod haar;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod measure;
pub mod suite;

pub use error::{Error, Result};

/// Plane point, used both for the half-plane `(x1, x2)` and for the disk
/// `(re, im)`.
pub type Point = [f64; 2];
