//! Spectral toolkit for periodic polyharmonic operators `(-Δ)^l + q(x)`.
//!
//! The crate is `no_std` with `alloc`. It covers lattice geometry, finite
//! Fourier potentials, a plane-wave Galerkin oracle for Bloch spectra, the
//! resonance classification of quasimomenta, the iterated non-resonant
//! eigenvalue series, resonance block matrices, simple-set checks and band
//! scanning. IO, configuration and the command-line driver live in the
//! `polyband` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod block;
pub mod cascade;
pub mod error;
pub mod float;
pub mod lattice;
pub mod linalg;
pub mod planewave;
pub mod potential;
pub mod resonance;
pub mod scanner;
pub mod series;
pub mod simple;

pub use error::{Error, Result};
pub use num_complex::Complex64;
