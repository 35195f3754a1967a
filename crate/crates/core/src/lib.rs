//! Exact computation of asymptotic invariants of plane polynomial maps:
//! the local attraction rate at a superattracting fixed point and the
//! dynamical degree at infinity, via blowup sequences, dual graphs,
//! valuation evaluation, tree potential theory and eigenvaluation search.
//!
//! All arithmetic is exact: rationals, real quadratic extensions, and
//! min-plus piecewise-affine functions. No floating point enters any
//! comparison; `f64` appears only in optional `approx` report fields.

pub mod error;
pub mod numbers;
pub mod poly;
pub mod blowup;
pub mod potential;
pub mod valuation;
pub mod dynamics;

pub use error::{Error, Result};
pub use numbers::{ExtValue, Scalar};
