//! General weighted extropy (GWE) of extreme ranked set sampling (ERSS) and
//! simple random sampling (SRS) designs.
//!
//! The crate is organised around a handful of modules:
//!
//! - [`distributions`]: parametric families, weights, Λ profiles and the
//!   order-statistic densities the formulas consume.
//! - [`quadrature`]: adaptive tanh-sinh integration, the oracle every closed
//!   form is checked against.
//! - [`extropy`]: J, J^w, SRS and ERSS GWE by closed form and by two
//!   independent quadrature routes.
//! - [`mc_sim`]: seeded simulation of the SRS/RSS/ERSS protocols and
//!   Kolmogorov–Smirnov checks of their marginals.
//! - [`order_checks`]: stochastic-order verifiers and the comparison, bound
//!   and characterization results built on them.
//! - [`cli`]: the command-line front end (`erss-extropy` binary).

pub mod cli;
pub mod distributions;
pub mod error;
pub mod extropy;
pub mod mc_sim;
pub mod order_checks;
pub mod quadrature;
pub mod special;

pub use distributions::{
    DistributionSpec, Family, LambdaProfile, MonotoneMap, OrderStatDensitySpec, WeightSpec,
};
pub use error::{Error, Result};
pub use extropy::{Engine, GweResult, Method, QConstants, Scheme};
pub use quadrature::{IntegralResult, Tolerance};
