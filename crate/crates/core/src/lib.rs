//! Semiclassical amplifier and ring-laser solvers.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`params`]: medium and cavity constants, and the reduction of incoherently
//!   pumped three- and four-level schemes to effective two-level constants.
//! - [`bloch`]: optical Bloch dynamics for two-, three- and four-level ensembles,
//!   steady states, the rate-equation limit and the adiabatic-elimination series.
//! - [`amplifier`]: single-pass propagation of a monochromatic field through a
//!   saturable medium, with the weak/strong-field closed forms.
//! - [`ring`]: steady lasing in a unidirectional ring cavity (output intensity,
//!   thresholds, frequency pulling, intracavity profile).
//! - [`lorenz`]: single-mode dynamics in the uniform-field limit, fixed points,
//!   linear stability, the Hopf threshold and Lyapunov exponents.
//! - [`multimode`]: the traveling-wave uniform-field equations on a periodic ring,
//!   integrated pseudo-spectrally, and the empty-cavity mode decomposition.
//!
//! Numerical building blocks live in [`ode`] (Dormand–Prince 5(4) with dense
//! output), [`roots`] (safeguarded Newton/bisection) and [`fft`] (radix-2).

#![no_std]
#![forbid(unsafe_code)]
// `!(x < y)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod amplifier;
pub mod bloch;
mod error;
pub mod fft;
pub mod lorenz;
pub mod multimode;
pub mod ode;
pub mod params;
pub mod ring;
pub mod roots;

pub use error::{Error, IntegrationError, Result};
pub use num_complex::Complex64;
