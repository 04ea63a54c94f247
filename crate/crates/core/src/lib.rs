//! Numerics for the Paley-Wiener spaces `E^p` (entire functions of exponential
//! type π whose restriction to the real line lies in `L^p`) and their Banach
//! and `q`-envelopes.
//!
//! Every function handled here is represented by a compactly supported,
//! piecewise-polynomial spectral density `s`, with
//!
//! ```text
//! f(z) = ∫ s(t) e^{izt} dt.
//! ```
//!
//! No 2π factor is used; with the unitary transform `f̂(ξ) = ∫ f(x) e^{-ixξ} dx`
//! one has `f̂ = 2π s`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and the verification harness live in the `pwenv` crate.

#![no_std]
// `!(a < b)` is the NaN-rejecting form throughout; keep it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conformal;
pub mod envelope;
mod error;
pub mod evaluate;
pub mod lp;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
