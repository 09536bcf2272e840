//! q-Pochhammer symbols, Gaussian binomials, theta-type bilateral series and
//! their one-sided generalizations, each with explicit truncation control.

mod coefficients;
mod products;
mod series;

pub use coefficients::CoefficientSequence;
pub use products::{gauss_binomial, q_pochhammer, triple_product_f, PochhammerLength, QFactorials};
pub use series::{
    bilateral_window_sum, falling_factorial, phi_j, psi_jn, theta, theta_j, x_jm, x_jm_abs,
    TailPolicy,
};
pub(crate) use series::{bilateral_cutoff, one_sided_cutoff};
