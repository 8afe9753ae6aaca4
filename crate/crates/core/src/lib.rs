//! Nonparametric copula estimation: the empirical, empirical checkerboard,
//! empirical beta and empirical Bernstein copulas, a validity checker for
//! Bernstein coefficient arrays, a sampler for the empirical beta copula and
//! a Monte Carlo harness measuring integrated squared bias, variance and
//! mean squared error.

pub mod bernstein;
pub mod data;
pub mod error;
pub mod estimators;
pub mod mc;
pub mod reference;
pub mod sampler;
pub mod special;
pub mod tensor;

pub use error::{CopulaError, Result};
