//! Exact simulation and sampled estimation for deterministic quantum
//! computation with pure states (DQCp) and with one clean qubit (DQC1).
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: bit-packed Pauli strings with exact phases.
//! - [`state`]: dense density operators, the exact reference for every estimator.
//! - [`circuit`]: Pauli-rotation gate networks, conditioning, `T_n`, Trotter compilation.
//! - [`measure`]: bounded-variance readout of `<Z_1>` and the median-of-means scheduler.
//! - [`protocols`]: trace, Pauli-coefficient and matrix-element estimators, pseudo-pure preparation.
//! - [`spectroscopy`]: sampling `f(t)` and Fourier transforming it into a broadened spectrum.
//! - [`oracle_lab`]: the flipped-oracle construction and the `4r/2^n` distinguishability bound.

pub mod circuit;
pub mod dense;
pub mod error;
pub mod measure;
pub mod oracle_lab;
pub mod pauli;
pub mod protocols;
pub mod spectroscopy;
pub mod state;

pub use error::{Error, Result};
