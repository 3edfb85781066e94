//! Pseudo-spectral machinery for the critical dissipative surface
//! quasi-geostrophic equation on the 2-torus `[0,2π]²`.
//!
//! A real mean-zero scalar is represented by its Fourier series
//! coefficients on the truncated lattice `|k|_∞ ≤ N`. On top of that
//! representation the crate provides
//!
//! - the Wiener-type norms `‖f‖_{X^σ} = Σ_k |k|^σ |a_k|` and the usual
//!   Fourier multipliers (dissipative semigroup, Gevrey weight,
//!   fractional `|D|^s`, Riesz velocity) in [`field`] and [`nonlinear`],
//! - the quadratic transport nonlinearity `div(θ u_θ)` with both a
//!   brute-force convolution and an exact padded-FFT path ([`nonlinear`]),
//! - a Picard fixed-point solver of the mild (Duhamel) formulation and
//!   exponential time-marching engines ([`solver`]),
//! - diagnostics that measure a-priori estimates, trajectory norms,
//!   Gevrey/analyticity bounds, frequency-splitting decay and a family
//!   of product/Duhamel inequalities on randomized fields ([`harness`]).
//!
//! The crate is `no_std` (with `alloc`); all file formats and the CLI
//! live in the companion `sqg-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod fft;
pub mod field;
pub mod harness;
pub mod nonlinear;
pub mod solver;

pub use field::{FieldError, NormReport, SpectralField, VectorField, Wave};
pub use nonlinear::{transport_term, ConvolutionPlan, ProductField};
pub use solver::{Engine, InitRecipe, SolverConfig, SolverError, Trajectory};
