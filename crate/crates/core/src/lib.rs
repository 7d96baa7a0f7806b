//! Bearing vibration diagnosis built around an adaptive FIR filter-bank
//! decomposition.
//!
//! The crate decomposes a vibration record into narrow-band modes with a
//! correlated-kurtosis deconvolution filter bank ([`fmd`]), tunes the
//! decomposition parameters with the artificial hummingbird optimizer
//! ([`aha`]) against the SIMI health indicator ([`indicators`]), and labels
//! bearing condition by minimum single-valued neutrosophic cross-entropy
//! between mode-energy signatures ([`neutrosophic`], [`pipeline`]).
//!
//! Synthetic bearing-fault records and fractional Gaussian noise for testing
//! and benchmarking live in [`sim`]; foundational signal numerics (windows,
//! convolution, autocorrelation, envelope spectra) live in [`signal`].
//!
//! All operations are pure functions of their inputs and safe to call from
//! any number of threads. Everything randomized is seeded explicitly and
//! reproduces bit-for-bit.

pub mod aha;
pub mod error;
mod fft;
pub mod fmd;
pub mod indicators;
pub mod neutrosophic;
pub mod pipeline;
pub mod signal;
pub mod sim;

pub use error::{CoreError, Result};
pub use signal::{FirFilter, Signal, Spectrum};
