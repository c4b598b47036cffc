//! Downlink analysis of cell-free massive MIMO with finite-capacity fronthaul.
//!
//! Two network architectures are modeled. In the *traditional* architecture a
//! fixed number of access points serve every user inside a finite disk, with
//! AP and user positions drawn as binomial point processes. In the
//! *user-centric* architecture APs and users form independent Poisson point
//! processes on the plane and each user is served by its nearest APs. In both
//! cases the baseband unit forwards compressed user symbols over per-AP
//! fronthaul links of fixed capacity, so the per-user compression error grows
//! with the number of users an AP serves.
//!
//! The crate provides two independent evaluation paths that are expected to
//! agree with each other:
//!
//! * an analytical path (conditional SINR expressions, point-process distance
//!   laws, AP-load moments with a negative-binomial fit, and rate-coverage
//!   integrals), and
//! * a Monte Carlo path ([`sim`]) that drops networks, associates and
//!   schedules users, and evaluates the same conditional SINR expressions
//!   per realization.
//!
//! Modules follow the pipeline: [`geometry`] (point sampling, circle
//! intersection kernels), [`propagation`] (path loss, channel estimation,
//! compression split), [`distances`] (distance distributions), [`numerics`]
//! (quadrature / QMC / Poisson sums), [`sinr`] (conditional SINR), [`load`]
//! (AP load statistics), [`coverage`] (rate-coverage evaluators), [`sim`]
//! (end-to-end simulation).

pub mod distances;
pub mod geometry;
pub mod load;
pub mod numerics;
pub mod propagation;
pub mod sinr;
pub mod testkit;

pub use propagation::{db_to_linear, linear_to_db, FronthaulParams, RadioParams};
