//! Membership- and attribute-inference adversaries against simple models,
//! with closed-form advantage curves and a Monte Carlo harness that pairs
//! empirical estimates against them.
//!
//! The crate is organized around the two inference experiments:
//!
//! * membership inference: given a point, a model, and the data
//!   distribution, decide whether the point was in the training set;
//! * attribute inference: given partial knowledge of a point and the model,
//!   recover its sensitive attribute.
//!
//! [`dist`] provides synthetic distributions, including idealized channels
//! that draw model residuals directly from member/population laws; [`models`]
//! provides trainable predictors (ridge, regression tree, an exponential-
//! mechanism learner, and a colluding trainer that plants keyed
//! query-response pairs); [`membership`], [`attribute`], and [`reductions`]
//! implement the adversaries; [`analytic`] the closed-form advantage curves
//! they are measured against; and [`harness`] the Monte Carlo drivers.

pub mod analytic;
pub mod attribute;
pub mod data;
pub mod dist;
pub mod error;
pub mod harness;
pub mod membership;
pub mod models;
pub mod reductions;
pub mod rng;
pub mod special;

pub use data::{DataPoint, Dataset, ErrorStats, LossKind, LossSpec, Provenance, Value};
pub use dist::{draw_challenge, AttributePart, SyntheticDistribution};
pub use error::{Error, Result};
pub use rng::{MasterSeed, Stream};
