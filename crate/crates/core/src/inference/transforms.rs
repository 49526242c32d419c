//! Unconstraining reparameterizations for the sampler.
//!
//! Box-bounded parameters move through a scaled logit, the positive-only
//! rationality parameter through a log. Proposals then live on the whole
//! real line, which removes boundary rejections; the log-Jacobian of each
//! map is added to the target density so the constrained-space posterior is
//! preserved.

use crate::models::ParamId;
use crate::util::{logit, sigmoid, softplus};

/// Transform of one coordinate between constrained and unconstrained space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Transform {
    /// x in (lo, hi) <-> z = logit((x - lo) / (hi - lo)).
    ScaledLogit { lo: f64, hi: f64 },
    /// x > 0 <-> z = ln x.
    Log,
}

impl Transform {
    pub(crate) fn for_param(id: ParamId) -> Self {
        match id.bounds() {
            (lo, Some(hi)) => Transform::ScaledLogit { lo, hi },
            (_, None) => Transform::Log,
        }
    }

    /// Constrained value for an unconstrained coordinate.
    pub(crate) fn to_constrained(&self, z: f64) -> f64 {
        match *self {
            Transform::ScaledLogit { lo, hi } => lo + (hi - lo) * sigmoid(z),
            Transform::Log => z.exp(),
        }
    }

    /// Unconstrained coordinate for an interior constrained value.
    pub(crate) fn to_unconstrained(&self, x: f64) -> f64 {
        match *self {
            Transform::ScaledLogit { lo, hi } => logit((x - lo) / (hi - lo)),
            Transform::Log => x.ln(),
        }
    }

    /// log |dx/dz| at an unconstrained coordinate.
    pub(crate) fn log_jacobian(&self, z: f64) -> f64 {
        match *self {
            // d/dz [lo + (hi-lo) sigmoid(z)] = (hi-lo) sigmoid(z) sigmoid(-z)
            Transform::ScaledLogit { lo, hi } => (hi - lo).ln() - softplus(z) - softplus(-z),
            Transform::Log => z,
        }
    }
}
