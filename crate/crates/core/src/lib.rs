//! Ancilla gadgets for multi-body Ising couplers.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`]: classical Ising Hamiltonians of arbitrary order, exhaustive
//!   enumeration, effective (ancilla-minimised) spectra and a Metropolis
//!   annealer.
//! * [`gadget`]: the N-local counting gadget, the single-ancilla 3-local
//!   gadget and the permutation-symmetric generalisation, with verifiers.
//! * [`circuit`]: the inductive coupler loop: inductance matrix, potential,
//!   bias fluxes and Born-Oppenheimer extraction of pairwise couplings.
//! * [`robustness`]: mutual-inductance mismatch model, ancilla-field
//!   correction, failure margins, Monte Carlo yield and three-body tolerance.
//! * [`parity`]: compilation of all-to-all 2-body problems onto the
//!   four-body plaquette layout and back.
//!
//! Hot loops (enumeration, Monte Carlo batches) run on rayon when the
//! `parallel` feature is enabled; [`Exec`] selects the path at runtime.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
mod error;
mod exec;
pub mod gadget;
pub mod parity;
pub mod robustness;
pub mod spin;

pub use error::{Error, Result};
pub use exec::Exec;

/// Absolute tolerance (in units of the largest |weight|) used for energy
/// equality checks throughout the crate.
pub const ENERGY_TOL: f64 = 1e-9;
