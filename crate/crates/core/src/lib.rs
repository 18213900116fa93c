//! A beam particle passing a harmonic oscillator, treated three ways.
//!
//! * [`classical`]: both particles obey Hamilton's equations.
//! * [`perturbation`] and [`tdse`]: the oscillator is quantized and driven by
//!   a classical beam.
//! * [`twoparticle`]: beam and oscillator share one wavefunction; the
//!   post-collision state is entangled.
//!
//! [`scenario`] ties these together into figure-ready CSV/JSON outputs.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod config;
pub mod error;
pub mod model;
pub mod output;
pub mod perturbation;
pub mod quadrature;
pub mod scenario;
pub mod stats;
pub mod tdse;
pub mod twoparticle;

pub use error::{Error, Result};
pub use model::{ModelParams, TabulatedWindow, WindowFunction};
