//! High-precision numerics for q-series, q-polynomials and the fermionic
//! matrix-model partition function `Ẑ_{L×N}`.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: scaled arbitrary-precision reals, evaluation contexts and
//!   precision escalation;
//! - [`qseries`]: q-Pochhammer products, Gaussian binomials and theta-type
//!   series with explicit truncation bounds;
//! - [`qpoly`]: exact coefficient arrays for general q-polynomials and the
//!   Stieltjes–Wigert, q⁻¹-Hermite and q-Laguerre families;
//! - [`asymptotics`]: theta-function asymptotics of `x^j P_n^{(j)}(x)` in
//!   the oscillatory and both non-oscillatory regimes, with error bounds;
//! - [`partition`]: exact Wronskian evaluation of `Ẑ_{L×N}` and its large-N
//!   limit;
//! - [`zeros`]: positive-zero location and zero-symmetry diagnostics;
//! - [`selftest`]: randomized identity suite.

pub mod asymptotics;
pub mod error;
pub mod numerics;
pub mod partition;
pub mod qpoly;
pub mod qseries;
pub mod selftest;
pub mod zeros;

pub use error::{Error, Result};
