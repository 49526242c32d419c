//! The 2x2 response-choice scenario: maps experimental conditions and a
//! parameter vector to concrete decision problems and predicted response
//! distributions.
//!
//! Conditions cross goal uncertainty (high/low) with option-space size
//! (large/small). Every condition yields a two-goal, three-action problem
//! with actions ordered (ms1, ms2, exhaustive); reports and count vectors
//! use the category order (cq, exhaustive, ms1, ms2).

use serde::{Deserialize, Serialize};

use crate::decision::{
    cq_probability_powerlaw, DecisionProblem, ResponseDistribution,
};
use crate::error::{Error, Result};

/// Goal uncertainty manipulated by the cover story.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Uncertainty {
    High,
    Low,
}

/// Number of contextually available options, which sets the exhaustive
/// answer's cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionSpace {
    Large,
    Small,
}

/// One cell of the 2x2 design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub uncertainty: Uncertainty,
    pub option_space: OptionSpace,
}

impl Condition {
    /// All four conditions in canonical order: high-large, low-large,
    /// high-small, low-small.
    pub const ALL: [Condition; 4] = [
        Condition {
            uncertainty: Uncertainty::High,
            option_space: OptionSpace::Large,
        },
        Condition {
            uncertainty: Uncertainty::Low,
            option_space: OptionSpace::Large,
        },
        Condition {
            uncertainty: Uncertainty::High,
            option_space: OptionSpace::Small,
        },
        Condition {
            uncertainty: Uncertainty::Low,
            option_space: OptionSpace::Small,
        },
    ];

    /// Position in [`Condition::ALL`].
    pub fn index(&self) -> usize {
        Condition::ALL
            .iter()
            .position(|c| c == self)
            .expect("all conditions enumerated")
    }

    pub fn label(&self) -> &'static str {
        match (self.uncertainty, self.option_space) {
            (Uncertainty::High, OptionSpace::Large) => "high_large",
            (Uncertainty::Low, OptionSpace::Large) => "low_large",
            (Uncertainty::High, OptionSpace::Small) => "high_small",
            (Uncertainty::Low, OptionSpace::Small) => "low_small",
        }
    }
}

/// Response categories in report order.
pub const CATEGORY_LABELS: [&str; 4] = ["cq", "exhaustive", "ms1", "ms2"];

/// Number of response categories (clarify + three direct answers).
pub const N_CATEGORIES: usize = 4;

/// The seven fitted scalars.
///
/// `epsilon_*` give the minor-goal probability per uncertainty condition,
/// `delta_*` the exhaustive answer's cost per option-space condition,
/// `alpha` the softmax rationality, and `tau`/`c` the gate shape and
/// location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub epsilon_low: f64,
    pub epsilon_high: f64,
    pub delta_large: f64,
    pub delta_small: f64,
    pub alpha: f64,
    pub tau: f64,
    pub c: f64,
}

impl ModelParams {
    /// Checks the box bounds and the variant's ablation constraints.
    pub fn validate(&self, variant: ModelVariant) -> Result<()> {
        let bounds = [
            ("epsilon_low", self.epsilon_low, 0.0, 0.5),
            ("epsilon_high", self.epsilon_high, 0.0, 0.5),
            ("delta_large", self.delta_large, 0.0, 1.0),
            ("delta_small", self.delta_small, 0.0, 1.0),
            ("tau", self.tau, 0.0, 5.0),
            ("c", self.c, 0.0, 1.0),
        ];
        for (name, value, lo, hi) in bounds {
            if !value.is_finite() || value < lo || value > hi {
                return Err(Error::InvalidParams(format!(
                    "{name} = {value} outside [{lo}, {hi}]"
                )));
            }
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha = {} must be positive",
                self.alpha
            )));
        }
        match variant {
            ModelVariant::NoDeltaCost => {
                if self.delta_large != 0.0 || self.delta_small != 0.0 {
                    return Err(Error::InvalidParams(
                        "no-cost variant requires delta_large = delta_small = 0".into(),
                    ));
                }
            }
            ModelVariant::NoEpsilonUncertainty => {
                if self.epsilon_low != 0.0 || self.epsilon_high != 0.0 {
                    return Err(Error::InvalidParams(
                        "no-uncertainty variant requires epsilon_low = epsilon_high = 0".into(),
                    ));
                }
            }
            ModelVariant::Main | ModelVariant::Eer => {}
        }
        Ok(())
    }

    fn epsilon(&self, uncertainty: Uncertainty) -> f64 {
        match uncertainty {
            Uncertainty::High => self.epsilon_high,
            Uncertainty::Low => self.epsilon_low,
        }
    }

    fn delta(&self, option_space: OptionSpace) -> f64 {
        match option_space {
            OptionSpace::Large => self.delta_large,
            OptionSpace::Small => self.delta_small,
        }
    }
}

/// The fitted model and its three competitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelVariant {
    /// Logistic gate on the best action's expected regret, all seven
    /// parameters free.
    Main,
    /// Answer costs ablated: both delta parameters pinned to zero.
    NoDeltaCost,
    /// Goal uncertainty ablated: both epsilon parameters pinned to zero.
    NoEpsilonUncertainty,
    /// Power-law gate on the policy-weighted aggregate expected regret.
    Eer,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 4] = [
        ModelVariant::Main,
        ModelVariant::NoDeltaCost,
        ModelVariant::NoEpsilonUncertainty,
        ModelVariant::Eer,
    ];

    /// CLI name.
    pub fn name(&self) -> &'static str {
        match self {
            ModelVariant::Main => "main",
            ModelVariant::NoDeltaCost => "no-cost",
            ModelVariant::NoEpsilonUncertainty => "no-uncertainty",
            ModelVariant::Eer => "eer",
        }
    }
}

impl std::str::FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(ModelVariant::Main),
            "no-cost" => Ok(ModelVariant::NoDeltaCost),
            "no-uncertainty" => Ok(ModelVariant::NoEpsilonUncertainty),
            "eer" => Ok(ModelVariant::Eer),
            other => Err(Error::InvalidParams(format!(
                "unknown model `{other}` (expected main|no-cost|no-uncertainty|eer)"
            ))),
        }
    }
}

impl std::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Instantiates the parameterized utility table for one condition:
/// goal prior (1 - eps, eps); actions (ms1, ms2, exh) with utilities
/// g1 -> (1, 0, 1 - delta) and g2 -> (0, 1, 1 - delta).
pub fn build_dp(condition: Condition, params: &ModelParams) -> DecisionProblem {
    let eps = params.epsilon(condition.uncertainty);
    let delta = params.delta(condition.option_space);
    DecisionProblem::new(
        vec!["g1".into(), "g2".into()],
        vec![1.0 - eps, eps],
        vec!["ms1".into(), "ms2".into(), "exh".into()],
        vec![
            vec![1.0, 0.0, 1.0 - delta],
            vec![0.0, 1.0, 1.0 - delta],
        ],
    )
    .expect("table construction satisfies decision-problem invariants")
}

/// Predicted response distribution for one condition under one variant.
///
/// Main and the two ablations gate on the best action's expected regret
/// through the logistic link; the aggregate-regret variant gates on the
/// policy-weighted expected regret through the power-law link. Either way
/// the non-clarification mass is allocated by the softmax policy.
pub fn predict(
    variant: ModelVariant,
    params: &ModelParams,
    condition: Condition,
) -> Result<ResponseDistribution> {
    params.validate(variant)?;
    let dp = build_dp(condition, params);
    match variant {
        ModelVariant::Main | ModelVariant::NoDeltaCost | ModelVariant::NoEpsilonUncertainty => {
            dp.response_distribution(params.alpha, params.tau, params.c)
        }
        ModelVariant::Eer => {
            let eval = dp.evaluate_policy(params.alpha)?;
            let eer = eval
                .policy
                .iter()
                .zip(&eval.exp_regret)
                .map(|(&pi, &er)| pi * er)
                .sum::<f64>();
            let p_cq = cq_probability_powerlaw(eer, params.tau, params.c)?;
            Ok(ResponseDistribution::from_gate_and_policy(p_cq, &eval.policy))
        }
    }
}

/// Reorders a scenario response distribution into the report category order
/// (cq, exhaustive, ms1, ms2).
pub fn category_probabilities(rd: &ResponseDistribution) -> [f64; N_CATEGORIES] {
    debug_assert_eq!(rd.p_action.len(), 3);
    [rd.p_cq, rd.p_action[2], rd.p_action[0], rd.p_action[1]]
}
