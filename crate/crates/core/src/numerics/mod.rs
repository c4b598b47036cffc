//! Shared integration and series engines.
//!
//! Everything downstream (load moments, coverage integrals) runs through the
//! three engines in this module: adaptive Gauss-Kronrod quadrature for one-
//! and two-dimensional integrals, randomized quasi-Monte Carlo for the higher
//! dimensional load integrals, and log-space Poisson pmf/cmf evaluation for
//! the point-count factors that appear inside every integrand.

pub mod poisson;
pub mod qmc;
pub mod quad;

pub use poisson::{poisson_cmf, poisson_pmf, sum_pmf_weighted};
pub use qmc::{integrate_qmc, QmcBox, QmcEstimate};
pub use quad::{integrate_1d, integrate_1d_split, integrate_2d, QuadResult, QuadTol};
