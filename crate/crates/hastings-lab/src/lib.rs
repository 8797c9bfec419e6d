//! Acceptance rules, parameterization transforms, seeded Markov chains and a
//! brute-force discrete oracle for the Hastings algorithm family.
//!
//! The whole family is generated by a single symmetric function of a state
//! pair: choosing it large enough makes the chain a Markovian
//! acceptance-rejection sampler, small enough a Markovian minorizing sampler,
//! and anything strictly between the two mass-to-proposal ratios collapses to
//! Metropolis-Hastings. The crate evaluates every named rule in log space
//! ([`acceptance`]), converts any parameterization into any other
//! ([`mappings`]), runs seeded chains with duplication accounting
//! ([`samplers`]), and checks detailed balance, stationarity and acceptance
//! orderings exactly on tabulated discrete kernels ([`oracle`]).
//!
//! ```
//! use hastings_lab::acceptance::{alpha_mh, AcceptanceRule};
//! use hastings_lab::model::DiscreteModel;
//! use hastings_lab::oracle;
//!
//! let model = DiscreteModel::new(
//!     vec![1.0, 2.0],
//!     vec![vec![0.5, 0.5], vec![0.5, 0.5]],
//! ).unwrap();
//! assert_eq!(alpha_mh(&model, 0, 1).unwrap(), 1.0);
//! let kernel = oracle::build_kernel(&model, &AcceptanceRule::mh()).unwrap();
//! let report = oracle::check_detailed_balance(&model, &kernel);
//! assert!(report.pass);
//! ```

// `!(v > 0.0)` is used deliberately throughout validation: unlike `v <= 0.0`
// it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod exec;
pub mod mappings;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod samplers;
pub mod stats;

mod error;

pub use error::{Error, Result};
