//! Reconstruction of real-valued bandlimited functions from the absolute
//! values of their uniform samples.
//!
//! A real bandlimited signal sampled above twice its Nyquist rate is
//! determined, up to a global sign, by the magnitudes of its samples alone.
//! This crate implements the constructive FFT-based recovery: square the
//! magnitudes, lift to a line in the upper half plane where the squared
//! signal has no zeros, unwrap its phase by quadrature of `Im(g'/g)`, and
//! take the square root back on the real axis.
//!
//! Entry points:
//! - [`pipeline::reconstruct`] runs the five-step pipeline;
//! - [`approx`] exposes the underlying sinc-Gaussian sampling operators and
//!   their error bounds;
//! - [`kernels`] the `G`, `G'`, `G*` kernel family;
//! - [`signals`] exact test signals (translated Bessel, multitone, the
//!   critical-rate counterexample pair).

// Validation code uses `!(x > 0.0)` deliberately: unlike `x <= 0.0`, the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod cli;
pub mod conv;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod pipeline;
pub mod signals;

pub use error::{Error, Result};
pub use kernels::{GStarCache, GStarTable};
pub use pipeline::{
    reconstruct, worst_case_error, ErrorDomain, MagnitudeSamples, ReconstructionConfig,
    ReconstructionResult,
};
pub use signals::TestSignal;
