//! Expected-regret model of clarification-question asking, with the full
//! Bayesian workflow around it.
//!
//! The model layers two choices: a logistic (or power-law) gate turns the
//! expected regret of the best available action into the probability of
//! asking a clarification question, and a softmax policy over expected
//! utilities allocates the remaining probability across direct answers.
//!
//! Crate layout:
//! - [`decision`]: the decision-theoretic core over arbitrary finite
//!   decision problems.
//! - [`scenario`]: the 2x2 response-choice design, parameter vector, and
//!   model variants.
//! - [`models`]: the variant registry (free parameters, gate kinds, bounds).
//! - [`inference`]: priors, multinomial likelihood, adaptive random-walk
//!   Metropolis sampling, split R-hat and bulk ESS.
//! - [`evaluation`]: posterior predictive checks, Bayesian posterior
//!   predictive p-values, PSIS-LOO cross-validation, and pairwise model
//!   comparison.
//! - [`data`]: response CSV ingestion, count aggregation, samples CSV, and
//!   JSON report serialization.
//! - [`simulate`]: seeded synthetic response generation.
//!
//! The `parallel` feature (on by default) runs chain execution and
//! draw-level evaluation loops on rayon; disabling it yields a fully
//! sequential build with bit-identical results.

pub mod data;
pub mod decision;
mod error;
pub mod evaluation;
pub mod inference;
pub mod models;
pub(crate) mod par;
pub mod rng;
pub mod scenario;
pub mod simulate;
pub(crate) mod util;

pub use error::{Error, Result};
