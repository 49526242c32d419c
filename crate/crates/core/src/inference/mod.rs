//! Bayesian inference for the response-choice model: priors, multinomial
//! likelihood, posterior sampling, and convergence diagnostics.

mod diagnostics;
mod sampler;
mod transforms;

pub use diagnostics::{bulk_ess, split_r_hat};
pub use sampler::{sample_posterior, sample_prior};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::factorial::ln_factorial;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::models::{variant_spec, ParamId};
use crate::scenario::{category_probabilities, predict, Condition, ModelParams, ModelVariant};
use crate::util;

/// Strict convergence gate: largest acceptable split R-hat.
pub const R_HAT_MAX: f64 = 1.01;

/// Strict convergence gate: smallest acceptable bulk ESS.
pub const ESS_MIN: f64 = 2000.0;

/// Mean of the rationality parameter's truncated-normal prior.
pub const ALPHA_PRIOR_MEAN: f64 = 5.0;

/// Standard deviation of the rationality parameter's prior.
pub const ALPHA_PRIOR_SD: f64 = 1.0;

/// Per-condition response counts in category order (cq, exhaustive, ms1,
/// ms2), one row per condition in [`Condition::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedCounts {
    counts: [[u64; 4]; 4],
    total_n: u64,
}

impl ObservedCounts {
    pub fn new(counts: [[u64; 4]; 4]) -> Self {
        let total_n = counts.iter().flatten().sum();
        Self { counts, total_n }
    }

    pub fn condition(&self, condition: Condition) -> &[u64; 4] {
        &self.counts[condition.index()]
    }

    pub fn rows(&self) -> &[[u64; 4]; 4] {
        &self.counts
    }

    pub fn total_n(&self) -> u64 {
        self.total_n
    }

    /// Number of responses in one condition.
    pub fn condition_n(&self, condition: Condition) -> u64 {
        self.counts[condition.index()].iter().sum()
    }

    /// Conditions whose count vector is all zero.
    pub fn zero_conditions(&self) -> Vec<Condition> {
        Condition::ALL
            .into_iter()
            .filter(|c| self.condition_n(*c) == 0)
            .collect()
    }

    /// Expands counts into one (condition, category) pair per individual
    /// response, in condition-major then category order.
    pub fn expand_observations(&self) -> Vec<(Condition, usize)> {
        let mut obs = Vec::with_capacity(self.total_n as usize);
        for condition in Condition::ALL {
            for (category, &k) in self.counts[condition.index()].iter().enumerate() {
                for _ in 0..k {
                    obs.push((condition, category));
                }
            }
        }
        obs
    }
}

/// Sampler configuration. Defaults follow the reference fit: four chains,
/// 3000 warm-up and 4000 main iterations each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub chains: usize,
    pub warmup: usize,
    pub draws: usize,
    pub seed: u64,
    pub target_accept: f64,
    pub init_jitter: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            chains: 4,
            warmup: 3000,
            draws: 4000,
            seed: 0,
            target_accept: 0.3,
            init_jitter: 1.0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chains < 2 {
            return Err(Error::Sampler("need at least 2 chains".into()));
        }
        if self.warmup < 100 || self.draws < 100 {
            return Err(Error::Sampler(
                "warmup and draws must each be at least 100".into(),
            ));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::Sampler(format!(
                "target_accept = {} outside (0, 1)",
                self.target_accept
            )));
        }
        if !self.init_jitter.is_finite() || self.init_jitter < 0.0 {
            return Err(Error::Sampler(format!(
                "init_jitter = {} must be finite and nonnegative",
                self.init_jitter
            )));
        }
        Ok(())
    }
}

/// Post-warmup posterior draws from all chains, in the free-parameter layout
/// of the fitted variant.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    variant: ModelVariant,
    param_names: Vec<String>,
    n_chains: usize,
    draws_per_chain: usize,
    /// Flat (chain, iteration, parameter) array.
    draws: Vec<f64>,
    /// Unnormalized log posterior (prior + likelihood) per (chain, iteration).
    log_density: Vec<f64>,
}

impl PosteriorSamples {
    /// Assembles samples from raw parts, checking shapes, bounds, and
    /// variant constraints for every draw.
    pub fn from_parts(
        variant: ModelVariant,
        n_chains: usize,
        draws_per_chain: usize,
        draws: Vec<f64>,
        log_density: Vec<f64>,
    ) -> Result<Self> {
        let spec = variant_spec(variant);
        let dim = spec.dim();
        if draws.len() != n_chains * draws_per_chain * dim {
            return Err(Error::Sampler(format!(
                "draw buffer has {} values, expected {}",
                draws.len(),
                n_chains * draws_per_chain * dim
            )));
        }
        if log_density.len() != n_chains * draws_per_chain {
            return Err(Error::Sampler(format!(
                "log-density buffer has {} values, expected {}",
                log_density.len(),
                n_chains * draws_per_chain
            )));
        }
        for vec in draws.chunks_exact(dim) {
            let params = spec.params_from_vector(vec)?;
            params.validate(variant)?;
        }
        Ok(Self {
            variant,
            param_names: spec.param_names().iter().map(|s| s.to_string()).collect(),
            n_chains,
            draws_per_chain,
            draws,
            log_density,
        })
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn dim(&self) -> usize {
        self.param_names.len()
    }

    pub fn n_chains(&self) -> usize {
        self.n_chains
    }

    pub fn draws_per_chain(&self) -> usize {
        self.draws_per_chain
    }

    /// Total retained draws across chains.
    pub fn n_draws(&self) -> usize {
        self.n_chains * self.draws_per_chain
    }

    /// Free-parameter vector of one flat draw index (chain-major).
    pub fn draw_vector(&self, draw: usize) -> &[f64] {
        let dim = self.dim();
        &self.draws[draw * dim..(draw + 1) * dim]
    }

    /// Full parameter set of one flat draw index.
    pub fn params_at(&self, draw: usize) -> ModelParams {
        variant_spec(self.variant)
            .params_from_vector(self.draw_vector(draw))
            .expect("stored draws have the variant's dimension")
    }

    pub fn log_density(&self) -> &[f64] {
        &self.log_density
    }

    /// Per-chain series of one parameter.
    pub fn param_chains(&self, param: usize) -> Vec<Vec<f64>> {
        let dim = self.dim();
        (0..self.n_chains)
            .map(|chain| {
                (0..self.draws_per_chain)
                    .map(|i| self.draws[(chain * self.draws_per_chain + i) * dim + param])
                    .collect()
            })
            .collect()
    }

    /// All draws of one parameter, pooled across chains.
    pub fn param_pooled(&self, param: usize) -> Vec<f64> {
        let dim = self.dim();
        (0..self.n_draws())
            .map(|i| self.draws[i * dim + param])
            .collect()
    }

    /// Split R-hat for one parameter.
    pub fn split_r_hat(&self, param: usize) -> f64 {
        let chains = self.param_chains(param);
        let refs: Vec<&[f64]> = chains.iter().map(|c| c.as_slice()).collect();
        diagnostics::split_r_hat(&refs)
    }

    /// Bulk ESS for one parameter, summed across chains.
    pub fn bulk_ess(&self, param: usize) -> f64 {
        let chains = self.param_chains(param);
        let refs: Vec<&[f64]> = chains.iter().map(|c| c.as_slice()).collect();
        diagnostics::bulk_ess(&refs)
    }
}

/// Posterior summary of one parameter. Degenerate diagnostics are carried as
/// `None` with the companion flag set, and serialize as JSON null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub cri_lower: f64,
    pub cri_upper: f64,
    pub r_hat: Option<f64>,
    pub r_hat_degenerate: bool,
    pub ess: Option<f64>,
    pub ess_degenerate: bool,
}

/// Strict-gate outcome recorded alongside the thresholds it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictGate {
    pub r_hat_max: f64,
    pub ess_min: f64,
    pub passed: bool,
}

/// Fit summary: per-parameter posterior statistics plus the seed and
/// configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: String,
    pub variant: ModelVariant,
    pub seed: u64,
    pub config: McmcConfig,
    pub parameters: Vec<ParamSummary>,
    pub strict: StrictGate,
}

impl FitReport {
    pub fn parameter(&self, name: &str) -> Option<&ParamSummary> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

/// Summarizes posterior samples: means, central 95% credible intervals,
/// split R-hat, and bulk ESS per parameter, plus the strict-gate verdict.
pub fn fit_report(samples: &PosteriorSamples, config: &McmcConfig) -> FitReport {
    let mut parameters = Vec::with_capacity(samples.dim());
    let mut passed = true;
    for (p, name) in samples.param_names().iter().enumerate() {
        let mut pooled = samples.param_pooled(p);
        pooled.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
        let mean = util::mean(&pooled);
        let cri_lower = util::quantile_sorted(&pooled, 0.025);
        let cri_upper = util::quantile_sorted(&pooled, 0.975);
        let r_hat = samples.split_r_hat(p);
        let ess = samples.bulk_ess(p);
        let r_hat_degenerate = !r_hat.is_finite();
        let ess_degenerate = !ess.is_finite();
        if r_hat_degenerate || r_hat >= R_HAT_MAX || ess_degenerate || ess < ESS_MIN {
            passed = false;
        }
        parameters.push(ParamSummary {
            name: name.clone(),
            mean,
            cri_lower,
            cri_upper,
            r_hat: (!r_hat_degenerate).then_some(r_hat),
            r_hat_degenerate,
            ess: (!ess_degenerate).then_some(ess),
            ess_degenerate,
        });
    }
    FitReport {
        schema_version: "1".into(),
        variant: samples.variant(),
        seed: config.seed,
        config: config.clone(),
        parameters,
        strict: StrictGate {
            r_hat_max: R_HAT_MAX,
            ess_min: ESS_MIN,
            passed,
        },
    }
}

fn ln_alpha_truncation() -> f64 {
    static LN_TRUNC: OnceLock<f64> = OnceLock::new();
    *LN_TRUNC.get_or_init(|| {
        let n = Normal::new(0.0, 1.0).expect("standard normal");
        // ln P(alpha > 0) = ln Phi(mean / sd) for the untruncated normal.
        n.cdf(ALPHA_PRIOR_MEAN / ALPHA_PRIOR_SD).ln()
    })
}

/// Log prior density of a parameter set under one variant.
///
/// Free parameters carry Uniform(lo, hi) densities except the rationality
/// parameter, which is Normal(5, 1) truncated to positives. Ablated
/// parameters contribute nothing but must sit at their pinned value.
/// Out-of-support parameter sets return negative infinity.
pub fn log_prior(params: &ModelParams, variant: ModelVariant) -> f64 {
    let spec = variant_spec(variant);
    match variant {
        ModelVariant::NoDeltaCost => {
            if params.delta_large != 0.0 || params.delta_small != 0.0 {
                return f64::NEG_INFINITY;
            }
        }
        ModelVariant::NoEpsilonUncertainty => {
            if params.epsilon_low != 0.0 || params.epsilon_high != 0.0 {
                return f64::NEG_INFINITY;
            }
        }
        ModelVariant::Main | ModelVariant::Eer => {}
    }
    let mut lp = 0.0;
    for id in &spec.free_parameters {
        let x = id.get(params);
        if !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        match id {
            ParamId::Alpha => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let z = (x - ALPHA_PRIOR_MEAN) / ALPHA_PRIOR_SD;
                lp += util::std_normal_pdf(z).ln() - ALPHA_PRIOR_SD.ln() - ln_alpha_truncation();
            }
            _ => {
                let (lo, hi) = id.bounds();
                let hi = hi.expect("bounded parameter");
                if x < lo || x > hi {
                    return f64::NEG_INFINITY;
                }
                lp -= (hi - lo).ln();
            }
        }
    }
    lp
}

/// Log pmf of a multinomial observation, coefficient included. Categories
/// with a zero predicted probability and a positive count force negative
/// infinity.
pub fn multinomial_ln_pmf(probs: &[f64], counts: &[u64]) -> f64 {
    assert_eq!(probs.len(), counts.len());
    let n: u64 = counts.iter().sum();
    let mut lp = ln_factorial(n);
    for (&p, &k) in probs.iter().zip(counts) {
        lp -= ln_factorial(k);
        if k > 0 {
            if p <= 0.0 {
                return f64::NEG_INFINITY;
            }
            lp += k as f64 * p.ln();
        }
    }
    lp
}

/// Log pmf of a binomial observation, coefficient included.
pub fn binomial_ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    debug_assert!(k <= n);
    let mut lp = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    if k > 0 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        lp += k as f64 * p.ln();
    }
    if n - k > 0 {
        if p >= 1.0 {
            return f64::NEG_INFINITY;
        }
        lp += (n - k) as f64 * (1.0 - p).ln();
    }
    lp
}

/// Full multinomial log likelihood of one condition's counts.
pub fn log_likelihood_condition(
    params: &ModelParams,
    variant: ModelVariant,
    condition: Condition,
    counts: &[u64; 4],
) -> f64 {
    match predict(variant, params, condition) {
        Ok(rd) => multinomial_ln_pmf(&category_probabilities(&rd), counts),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Log likelihood of all four conditions' counts: the sum of per-condition
/// multinomial log pmfs under the variant's predicted distributions.
pub fn log_likelihood(params: &ModelParams, variant: ModelVariant, data: &ObservedCounts) -> f64 {
    Condition::ALL
        .into_iter()
        .map(|c| log_likelihood_condition(params, variant, c, data.condition(c)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams {
            epsilon_low: 0.17,
            epsilon_high: 0.49,
            delta_large: 0.32,
            delta_small: 0.11,
            alpha: 5.0,
            tau: 3.60,
            c: 0.18,
        }
    }

    #[test]
    fn log_prior_closed_form_at_alpha_mean() {
        // 2 ln 2 - ln 5 + ln phi(0) - ln Phi(5)
        let lp = log_prior(&params(), ModelVariant::Main);
        assert!((lp - (-1.1420)).abs() < 1e-3, "lp = {lp}");
    }

    #[test]
    fn log_prior_out_of_support() {
        let mut p = params();
        p.epsilon_low = 0.6;
        assert_eq!(log_prior(&p, ModelVariant::Main), f64::NEG_INFINITY);
        let mut p = params();
        p.alpha = -1.0;
        assert_eq!(log_prior(&p, ModelVariant::Main), f64::NEG_INFINITY);
    }

    #[test]
    fn log_prior_gaussian_increment() {
        let p5 = params();
        let mut p6 = params();
        p6.alpha = 6.0;
        let diff = log_prior(&p6, ModelVariant::Main) - log_prior(&p5, ModelVariant::Main);
        assert!((diff - (-0.5)).abs() < 1e-12, "diff = {diff}");
    }

    #[test]
    fn log_prior_ablated_fields_contribute_nothing() {
        let mut p = params();
        p.delta_large = 0.0;
        p.delta_small = 0.0;
        let no_cost = log_prior(&p, ModelVariant::NoDeltaCost);
        let main = log_prior(&p, ModelVariant::Main);
        // The two delta Uniform(0,1) terms are zero, so only the support
        // checks differ between the two variants here.
        assert_eq!(no_cost, main);
        // A pinned field off its pinned value is out of support.
        let off = params();
        assert_eq!(log_prior(&off, ModelVariant::NoDeltaCost), f64::NEG_INFINITY);
    }

    #[test]
    fn multinomial_pmf_hand_values() {
        // ln C(10; 10,0,0,0) = 0, so the value is 10 ln 0.5.
        let lp = multinomial_ln_pmf(&[0.5, 0.3, 0.1, 0.1], &[10, 0, 0, 0]);
        assert!((lp - 10.0 * 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(multinomial_ln_pmf(&[0.5, 0.5], &[0, 0]), 0.0);
        assert_eq!(
            multinomial_ln_pmf(&[0.0, 1.0], &[1, 0]),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn binomial_pmf_matches_multinomial_two_cats() {
        let a = binomial_ln_pmf(3, 10, 0.4);
        let b = multinomial_ln_pmf(&[0.4, 0.6], &[3, 7]);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn likelihood_sums_over_conditions() {
        let data = ObservedCounts::new([
            [60, 30, 20, 15],
            [30, 20, 60, 15],
            [40, 50, 20, 15],
            [10, 30, 70, 15],
        ]);
        let total = log_likelihood(&params(), ModelVariant::Main, &data);
        let by_condition: f64 = Condition::ALL
            .into_iter()
            .map(|c| log_likelihood_condition(&params(), ModelVariant::Main, c, data.condition(c)))
            .sum();
        assert!((total - by_condition).abs() < 1e-12);
        assert!(total.is_finite());
    }

    #[test]
    fn likelihood_of_empty_data_is_zero() {
        let data = ObservedCounts::new([[0; 4]; 4]);
        assert_eq!(log_likelihood(&params(), ModelVariant::Main, &data), 0.0);
        assert_eq!(data.zero_conditions().len(), 4);
    }

    #[test]
    fn counts_expansion_matches_totals() {
        let data = ObservedCounts::new([
            [2, 1, 0, 0],
            [0, 0, 0, 0],
            [0, 0, 3, 0],
            [0, 0, 0, 1],
        ]);
        assert_eq!(data.total_n(), 7);
        let obs = data.expand_observations();
        assert_eq!(obs.len(), 7);
        assert_eq!(obs[0], (Condition::ALL[0], 0));
        assert_eq!(obs[2], (Condition::ALL[0], 1));
        assert_eq!(obs[6], (Condition::ALL[3], 3));
    }

    #[test]
    fn config_validation() {
        let ok = McmcConfig::default();
        assert!(ok.validate().is_ok());
        assert_eq!((ok.chains, ok.warmup, ok.draws), (4, 3000, 4000));
        let bad = McmcConfig {
            chains: 1,
            ..McmcConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = McmcConfig {
            draws: 50,
            ..McmcConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
