//! Expected volume of the Wiener sausage swept by a ball moving along a
//! Brownian motion with constant drift.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: log-scaled modified Bessel functions of real order, Gamma,
//!   Gegenbauer polynomials, sphere constants and checkable inequalities.
//! - [`quad`]: adaptive Gauss–Legendre quadrature.
//! - [`laplace`]: Laplace-domain evaluators and Gaver–Stehfest inversion.
//! - [`driftless`]: driftless sausage profiles `L_0^m` and their damped forms.
//! - [`sausage`]: the series formula for `E[vol W(t)]` and the transform route.
//! - [`asymptotics`]: the long-time growth constant and its drift-free limit.
//! - [`simulate`]: Monte Carlo oracle over discretised drifted paths.

// `!(x > 0.0)` is how domain checks reject NaN alongside bad values; series
// coefficients are kept at the precision they were generated with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod driftless;
mod error;
pub mod laplace;
pub mod quad;
pub mod sausage;
pub mod simulate;
pub mod specfun;
mod summation;

pub use error::{Error, Result};
pub use sausage::{ModelParams, Route, VolumeResult};
pub use specfun::{LogScaled, Order};
