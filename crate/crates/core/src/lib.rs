//! Analytic models and seeded Monte Carlo for two-station, three-setting
//! Bell-type experiments.
//!
//! The crate covers five connected constructions:
//!
//! - [`mermin`]: exact joint color tables for the singlet-fed two-detector
//!   device (equal-color probability 1 on equal settings, 1/4 otherwise),
//!   raw-spin anticorrelation, and probability-additive effect mixtures.
//! - [`lhv`]: deterministic instruction-set models over the eight
//!   three-letter states, whose different-setting equal-color frequency can
//!   never drop below 1/3 — strictly above the 1/4 of the singlet table.
//! - [`loophole`]: state-dependent detection probabilities (p, q) under
//!   which the unconditional equal-color-and-detected rate is (p² + q²)/4,
//!   matching 1/4 whenever p² + q² = 1.
//! - [`regress`]: the macroscopic analogue — a noise-free latent-block
//!   regression Z = TA + UB where projecting out the known block recovers
//!   the hidden side's row space and Gram matrix.
//! - [`params`]: a registry of declared experiments that classifies
//!   parameter tuples as realizable by one experiment or as total
//!   parameters with no jointly observable value.
//!
//! [`montecarlo`] samples the delayed-choice experiment under any of the
//! first three models with counter-addressed random streams, so runs are
//! reproducible and partition-invariant.
//!
//! The analytic kernels are generic over [`scalar::Scalar`]; instantiate
//! with [`Rat`] for exact rational claims and `f64` for everything
//! continuous.

#![forbid(unsafe_code)]

pub mod lhv;
pub mod loophole;
pub mod mermin;
pub mod montecarlo;
pub mod params;
pub mod regress;
pub mod rng;
pub mod scalar;

pub use scalar::{RealScalar, Scalar};

/// Exact rational probability scalar.
pub type Rat = num_rational::Rational64;

/// Float-lane joint color table.
pub type ProbTable64 = mermin::ProbTable<f64>;
/// Exact-lane joint color table.
pub type ProbTableExact = mermin::ProbTable<Rat>;
/// Float-lane instruction-state distribution.
pub type StateDistribution64 = lhv::StateDistribution<f64>;
/// Exact-lane instruction-state distribution.
pub type StateDistributionExact = lhv::StateDistribution<Rat>;
/// Float-lane detection model.
pub type DetectionModel64 = loophole::DetectionModel<f64>;
/// Exact-lane detection model.
pub type DetectionModelExact = loophole::DetectionModel<Rat>;
/// Float-lane dense matrix.
pub type Matrix64 = regress::Matrix<f64>;
