//! Spectra of thin periodic ladders and their quantum-graph limit.
//!
//! The crate is organised in layers:
//!
//! - [`graph`]: closed-form spectral theory of the limit graph operator
//!   (dispersion relations, bands and gaps, defect eigenvalues for a
//!   perturbed rung, eigenfunctions, flat bands).
//! - [`oracle`]: a brute-force 1-D finite element discretisation of the
//!   same graph operator, used to cross-check [`graph`].
//! - [`fem`]: 2-D P1 finite elements on the actual thin ladder: Bloch
//!   cell problems, perturbed supercells and the pseudo-mode residual.
//! - [`eigensolve`]: dense and sparse shift-invert Hermitian eigensolvers.
//! - [`report`], [`study`] and [`cli`]: serialisable results, ε-sweeps with
//!   slope fits, and the `ladder` command-line front end.

// NaN must fail the range checks, so they are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod fem;
pub mod graph;
pub mod oracle;
pub mod params;
pub mod report;
pub mod roots;
pub mod study;

pub use error::{Error, Result};
pub use params::{LadderParams, LengthSpec, SymmetryClass};
