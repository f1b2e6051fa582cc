//! Photoionization under intense light: rate models, breakdown kinetics,
//! threshold analysis, and parameter fitting.
//!
//! The crate compares three descriptions of below-threshold photoionization —
//! perturbative multiphoton absorption, the effective-photon energy shift, and
//! an extended-electron model whose coupling N = σ·n^(2/3) makes the yield
//! linear in intensity — and provides the data-side tooling (slope regression,
//! inflection detection, nonlinear fits) needed to tell them apart on
//! experimental-style series.

pub mod analysis;
pub mod cloud;
pub mod dataio;
pub mod error;
pub mod kinetics;
pub mod models;
pub mod units;

pub use error::{Error, ErrorClass, Result};
