//! Numerical core for generalized Schrödinger propagators `e^{itP(D)}`
//! evaluated along curves `γ(x, t)`.
//!
//! Functions are represented spectrally: a [`SpectralField`] holds samples of
//! `f̂` on a uniform [`FrequencyGrid`], and every spatial quantity is obtained
//! by trapezoidal quadrature of
//!
//! ```text
//! e^{itP(D)} f(x) = ∫ e^{i x·ξ + i t P(ξ)} f̂(ξ) dξ .
//! ```
//!
//! All Sobolev norms are spectral, `‖f‖²_{H^s} = ∫ (1+|ξ|²)^s |f̂(ξ)|² dξ`.
//!
//! The crate is `no_std` and only needs `alloc`. FFT fast paths, parallel
//! batch drivers, file formats and the CLI live in the `curveprop` crate.

#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod curve;
pub mod decomp;
pub mod error;
pub mod experiments;
pub mod field;
pub mod fit;
pub mod grid;
pub mod propagator;
pub mod rng;
pub mod symbol;

pub use curve::{Ball, Curve, CurveKind};
pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::FrequencyGrid;
pub use propagator::Propagator;
pub use symbol::{Symbol, SymbolKind};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;
