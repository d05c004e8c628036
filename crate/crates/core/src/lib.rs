//! Simulation of ideal quantum measurement and two-photon interferometry.
//!
//! The crate builds the entangled state of a two-level quantum and its
//! detector, derives the local mixture statistics and the nonlocal
//! correlation curve that state predicts, and verifies both with seeded
//! Monte Carlo coincidence counting.
//!
//! - [`numerics`] — dense complex vectors and matrices up to dimension 16,
//!   with a Jacobi eigensolver and a small SVD.
//! - [`qstate`] — pure states, density operators, partial trace, Schmidt
//!   decomposition, entropy and purity.
//! - [`vn_measure`] — the ideal premeasurement interaction, Born-rule
//!   probabilities and reproducible outcome sampling.
//! - [`optics`] — beam splitters, phase shifters and barriers over dual-rail
//!   path qubits; the two-photon interferometer and its calibration.
//! - [`experiments`] — runnable reproductions: phase scan, coincidence
//!   trials, CHSH, no-signaling sweep, decoherence chain, basis rotation.

#![forbid(unsafe_code)]

pub mod error;
pub mod experiments;
pub mod numerics;
pub mod optics;
pub mod qstate;
pub mod vn_measure;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexVector, Eigensystem, Svd, MAX_DIM};
pub use qstate::{DensityOperator, PureState, SchmidtForm, SubsystemLayout};
pub use vn_measure::{ApparatusSpec, OutcomeRecord, StreamRng};
