//! Variant registry: binds each model variant to its free parameters, gate
//! kind, and parameter bounds. The sampler and the evaluation layer both go
//! through this table, so parameter-vector layouts stay consistent
//! everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{ModelParams, ModelVariant};

/// Identifies one of the seven model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamId {
    EpsilonLow,
    EpsilonHigh,
    DeltaLarge,
    DeltaSmall,
    Alpha,
    Tau,
    C,
}

impl ParamId {
    pub const ALL: [ParamId; 7] = [
        ParamId::EpsilonLow,
        ParamId::EpsilonHigh,
        ParamId::DeltaLarge,
        ParamId::DeltaSmall,
        ParamId::Alpha,
        ParamId::Tau,
        ParamId::C,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ParamId::EpsilonLow => "epsilon_low",
            ParamId::EpsilonHigh => "epsilon_high",
            ParamId::DeltaLarge => "delta_large",
            ParamId::DeltaSmall => "delta_small",
            ParamId::Alpha => "alpha",
            ParamId::Tau => "tau",
            ParamId::C => "c",
        }
    }

    /// Support of the parameter's prior. `None` marks an unbounded side.
    pub fn bounds(&self) -> (f64, Option<f64>) {
        match self {
            ParamId::EpsilonLow | ParamId::EpsilonHigh => (0.0, Some(0.5)),
            ParamId::DeltaLarge | ParamId::DeltaSmall => (0.0, Some(1.0)),
            ParamId::Alpha => (0.0, None),
            ParamId::Tau => (0.0, Some(5.0)),
            ParamId::C => (0.0, Some(1.0)),
        }
    }

    pub fn get(&self, params: &ModelParams) -> f64 {
        match self {
            ParamId::EpsilonLow => params.epsilon_low,
            ParamId::EpsilonHigh => params.epsilon_high,
            ParamId::DeltaLarge => params.delta_large,
            ParamId::DeltaSmall => params.delta_small,
            ParamId::Alpha => params.alpha,
            ParamId::Tau => params.tau,
            ParamId::C => params.c,
        }
    }

    pub fn set(&self, params: &mut ModelParams, value: f64) {
        match self {
            ParamId::EpsilonLow => params.epsilon_low = value,
            ParamId::EpsilonHigh => params.epsilon_high = value,
            ParamId::DeltaLarge => params.delta_large = value,
            ParamId::DeltaSmall => params.delta_small = value,
            ParamId::Alpha => params.alpha = value,
            ParamId::Tau => params.tau = value,
            ParamId::C => params.c = value,
        }
    }
}

/// How the clarification probability is derived from regret quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// Logistic link on the best action's expected regret.
    LogisticOnBest,
    /// Power-law link on the policy-weighted aggregate expected regret.
    PowerLawOnEer,
}

/// Constraint table for one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSpec {
    pub variant: ModelVariant,
    pub free_parameters: Vec<ParamId>,
    pub gate: GateKind,
}

/// Registry lookup.
pub fn variant_spec(variant: ModelVariant) -> VariantSpec {
    let free_parameters = match variant {
        ModelVariant::Main | ModelVariant::Eer => ParamId::ALL.to_vec(),
        ModelVariant::NoDeltaCost => vec![
            ParamId::EpsilonLow,
            ParamId::EpsilonHigh,
            ParamId::Alpha,
            ParamId::Tau,
            ParamId::C,
        ],
        ModelVariant::NoEpsilonUncertainty => vec![
            ParamId::DeltaLarge,
            ParamId::DeltaSmall,
            ParamId::Alpha,
            ParamId::Tau,
            ParamId::C,
        ],
    };
    let gate = match variant {
        ModelVariant::Eer => GateKind::PowerLawOnEer,
        _ => GateKind::LogisticOnBest,
    };
    VariantSpec {
        variant,
        free_parameters,
        gate,
    }
}

impl VariantSpec {
    /// Parameter-vector dimension.
    pub fn dim(&self) -> usize {
        self.free_parameters.len()
    }

    pub fn param_names(&self) -> Vec<&'static str> {
        self.free_parameters.iter().map(|p| p.name()).collect()
    }

    /// Expands a free-parameter vector into a full parameter set, with
    /// ablated fields pinned to zero.
    pub fn params_from_vector(&self, values: &[f64]) -> Result<ModelParams> {
        if values.len() != self.dim() {
            return Err(Error::InvalidParams(format!(
                "expected {} values for {}, got {}",
                self.dim(),
                self.variant,
                values.len()
            )));
        }
        let mut params = ModelParams {
            epsilon_low: 0.0,
            epsilon_high: 0.0,
            delta_large: 0.0,
            delta_small: 0.0,
            alpha: 0.0,
            tau: 0.0,
            c: 0.0,
        };
        for (id, &v) in self.free_parameters.iter().zip(values) {
            id.set(&mut params, v);
        }
        Ok(params)
    }

    /// Projects a full parameter set onto the variant's free coordinates.
    pub fn vector_from_params(&self, params: &ModelParams) -> Vec<f64> {
        self.free_parameters.iter().map(|p| p.get(params)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::log_likelihood;
    use crate::inference::ObservedCounts;

    #[test]
    fn registry_dimensions_and_gates() {
        let main = variant_spec(ModelVariant::Main);
        assert_eq!(main.dim(), 7);
        assert_eq!(main.gate, GateKind::LogisticOnBest);

        let no_cost = variant_spec(ModelVariant::NoDeltaCost);
        assert_eq!(no_cost.dim(), 5);
        assert!(!no_cost.free_parameters.contains(&ParamId::DeltaLarge));
        assert!(!no_cost.free_parameters.contains(&ParamId::DeltaSmall));

        let no_unc = variant_spec(ModelVariant::NoEpsilonUncertainty);
        assert_eq!(no_unc.dim(), 5);
        assert!(!no_unc.free_parameters.contains(&ParamId::EpsilonLow));

        let eer = variant_spec(ModelVariant::Eer);
        assert_eq!(eer.dim(), 7);
        assert_eq!(eer.gate, GateKind::PowerLawOnEer);
    }

    #[test]
    fn vector_round_trip() {
        let spec = variant_spec(ModelVariant::NoDeltaCost);
        let v = vec![0.1, 0.4, 5.0, 2.0, 0.3];
        let params = spec.params_from_vector(&v).unwrap();
        assert_eq!(params.delta_large, 0.0);
        assert_eq!(params.delta_small, 0.0);
        assert_eq!(spec.vector_from_params(&params), v);
        assert!(spec.params_from_vector(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn zeroed_delta_draw_matches_no_cost_likelihood() {
        let data = ObservedCounts::new([
            [40, 30, 30, 25],
            [20, 30, 50, 25],
            [30, 40, 30, 25],
            [10, 40, 50, 25],
        ]);
        let mut params = ModelParams {
            epsilon_low: 0.2,
            epsilon_high: 0.45,
            delta_large: 0.3,
            delta_small: 0.1,
            alpha: 4.0,
            tau: 2.0,
            c: 0.25,
        };
        params.delta_large = 0.0;
        params.delta_small = 0.0;
        let main = log_likelihood(&params, ModelVariant::Main, &data);
        let ablated = log_likelihood(&params, ModelVariant::NoDeltaCost, &data);
        assert_eq!(main, ablated);
    }
}
