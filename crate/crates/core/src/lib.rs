//! Sum-of-squares relaxations and rounding for independent sets and
//! colorings on expander graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graphs`]: graph type, instance generators, spectral statistics and an
//!   exact independent-set oracle for small graphs.
//! * [`polyapprox`]: univariate polynomials, the Bernstein square-root proxy,
//!   step polynomials and iterated maps.
//! * [`hypercube`]: Boolean functions on the cube, Fourier weights and the
//!   vertex-boundary machinery behind the noisy-hypercube certificate.
//! * [`patterns`]: pattern weights over copies, gadget graphs and the
//!   finite-dimensional lemma checkers.
//! * [`pseudodist`]: moment-based pseudo-distributions, the SDP solver,
//!   conditioning, products and mutual-information statistics.
//! * [`rounding`]: the rounding algorithms built on top of all of the above.
//! * [`experiment`]: configuration, result rows and CSV output shared by the
//!   command-line tool.
//!
//! Data-parallel loops go through [`exec`], which falls back to plain
//! iteration when the `parallel` feature is disabled.

pub mod error;
pub mod exec;
pub mod experiment;
pub mod graphs;
pub mod hypercube;
pub mod linalg;
pub mod patterns;
pub mod polyapprox;
pub mod pseudodist;
pub mod rng;
pub mod rounding;

pub use error::{Error, Result};
pub use graphs::Graph;
