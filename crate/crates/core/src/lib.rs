//! Tunneling decay of trapped fermionic atom-number states.
//!
//! Single-particle orbitals of a bathtub well are evolved with Crank–Nicolson
//! after the right wall is lowered into a finite barrier. Multi-particle
//! non-escape and survival probabilities and the counting statistics follow
//! from determinants of orbital overlap matrices, and are compared with the
//! analytic short-time (Zeno) and semiclassical (WKB) predictions.
//!
//! Results for polarized fermions apply unchanged to a Tonks–Girardeau gas of
//! hard-core bosons through the Bose–Fermi mapping.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod absorber;
pub mod config;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod pipeline;
pub mod potentials;
pub mod propagator;
pub mod ratefit;
pub mod semiclassical;
pub mod series;
pub mod tridiag;
pub mod zeno;

pub use error::{Error, Result};
