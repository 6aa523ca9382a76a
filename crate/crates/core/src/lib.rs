//! Exact and certified norms for tensor products of sup-norm spaces.
//!
//! The crate builds the Hilbert-matrix family, the Haar and Rademacher
//! systems and the summing-basis tensors `Σ e_i ⊗ s_i (⊗ f_i)`, computes
//! exact sign-cube norms of bilinear and trilinear forms, and brackets
//! projective tensor norms of small tensors with a cutting-plane linear
//! program whose separation oracle is exact enumeration.
//!
//! Module map:
//!
//! - [`linalg`]: dense vectors, matrices, 3-tensors, sign vectors, spectral norm.
//! - [`constructions`]: every explicit object (h_n, p_n, Haar, Rademacher, tensors, tree branches).
//! - [`norms`]: `∞→1`, `∞→2` and trilinear sign-cube norms, exact and heuristic.
//! - [`projective`]: LP solver, cutting-plane projective norm, slice bounds, dual lower bounds.
//! - [`bounds`]: inequality checks, growth sweeps and the experiment suites.
//! - [`report`]: CSV rendering of check reports.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod constructions;
mod error;
pub mod linalg;
pub mod norms;
pub mod projective;
pub mod report;

pub use error::{Error, Result};
