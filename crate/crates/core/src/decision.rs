//! Layered decision model over finite decision problems.
//!
//! A [`DecisionProblem`] is a finite set of goals with a prior, a finite set
//! of actions, and a goal-by-action utility matrix. On top of it this module
//! computes expected utility, a softmax behavioral policy, the regret matrix,
//! per-action expected regret, the logistic gate from expected regret to the
//! probability of asking a clarification question, and the resulting mixture
//! distribution over {clarify} ∪ actions.
//!
//! Everything here is a pure function of its inputs; values are freely
//! shareable across threads.

use crate::error::{Error, Result};

/// Tolerance for "probabilities sum to one" checks at construction time.
const PROB_SUM_TOL: f64 = 1e-9;

/// A finite decision problem: goals with a prior, actions, and utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    goal_ids: Vec<String>,
    goal_prior: Vec<f64>,
    action_ids: Vec<String>,
    /// Row-major (goal, action) utility matrix.
    utilities: Vec<f64>,
}

/// Dense (goal, action) matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalActionMatrix {
    n_goals: usize,
    n_actions: usize,
    data: Vec<f64>,
}

impl GoalActionMatrix {
    fn new(n_goals: usize, n_actions: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n_goals * n_actions);
        Self {
            n_goals,
            n_actions,
            data,
        }
    }

    pub fn n_goals(&self) -> usize {
        self.n_goals
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, goal: usize, action: usize) -> f64 {
        self.data[goal * self.n_actions + action]
    }

    /// Row for one goal, one entry per action.
    pub fn row(&self, goal: usize) -> &[f64] {
        &self.data[goal * self.n_actions..(goal + 1) * self.n_actions]
    }
}

impl DecisionProblem {
    /// Validates and builds a decision problem.
    ///
    /// `utilities` is indexed by goal (rows) and action (columns). The prior
    /// must be a probability vector over goals; at least one goal and two
    /// actions are required, and all numbers must be finite.
    pub fn new(
        goal_ids: Vec<String>,
        goal_prior: Vec<f64>,
        action_ids: Vec<String>,
        utilities: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if goal_ids.is_empty() {
            return Err(Error::InvalidDecisionProblem("no goals".into()));
        }
        if action_ids.len() < 2 {
            return Err(Error::InvalidDecisionProblem(
                "need at least two actions".into(),
            ));
        }
        if goal_prior.len() != goal_ids.len() {
            return Err(Error::InvalidDecisionProblem(format!(
                "prior has {} entries for {} goals",
                goal_prior.len(),
                goal_ids.len()
            )));
        }
        for (i, &p) in goal_prior.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidDecisionProblem(format!(
                    "prior entry {i} is {p}, outside [0, 1]"
                )));
            }
        }
        let sum: f64 = goal_prior.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDecisionProblem(format!(
                "prior sums to {sum}, not 1"
            )));
        }
        if utilities.len() != goal_ids.len() {
            return Err(Error::InvalidDecisionProblem(format!(
                "utility matrix has {} rows for {} goals",
                utilities.len(),
                goal_ids.len()
            )));
        }
        let mut flat = Vec::with_capacity(goal_ids.len() * action_ids.len());
        for (g, row) in utilities.iter().enumerate() {
            if row.len() != action_ids.len() {
                return Err(Error::InvalidDecisionProblem(format!(
                    "utility row {g} has {} entries for {} actions",
                    row.len(),
                    action_ids.len()
                )));
            }
            for (a, &u) in row.iter().enumerate() {
                if !u.is_finite() {
                    return Err(Error::InvalidDecisionProblem(format!(
                        "utility ({g}, {a}) is not finite"
                    )));
                }
                flat.push(u);
            }
        }
        Ok(Self {
            goal_ids,
            goal_prior,
            action_ids,
            utilities: flat,
        })
    }

    pub fn n_goals(&self) -> usize {
        self.goal_ids.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_ids.len()
    }

    pub fn goal_ids(&self) -> &[String] {
        &self.goal_ids
    }

    pub fn action_ids(&self) -> &[String] {
        &self.action_ids
    }

    pub fn goal_prior(&self) -> &[f64] {
        &self.goal_prior
    }

    pub fn utility(&self, goal: usize, action: usize) -> f64 {
        self.utilities[goal * self.n_actions() + action]
    }

    /// Prior-weighted payoff of each action.
    pub fn expected_utility(&self) -> Vec<f64> {
        let n_actions = self.n_actions();
        let mut eu = vec![0.0; n_actions];
        for (g, &p) in self.goal_prior.iter().enumerate() {
            for (a, e) in eu.iter_mut().enumerate() {
                *e += p * self.utility(g, a);
            }
        }
        eu
    }

    /// Payoff shortfall of each action relative to the best action per goal:
    /// entry (g, a) = max_r U(g, r) - U(g, a).
    pub fn regret_matrix(&self) -> GoalActionMatrix {
        let n_actions = self.n_actions();
        let mut data = Vec::with_capacity(self.n_goals() * n_actions);
        for g in 0..self.n_goals() {
            let row = &self.utilities[g * n_actions..(g + 1) * n_actions];
            let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            data.extend(row.iter().map(|&u| best - u));
        }
        GoalActionMatrix::new(self.n_goals(), n_actions, data)
    }

    /// Prior-weighted regret of one action.
    pub fn expected_regret(&self, action: usize) -> f64 {
        assert!(action < self.n_actions(), "action index out of range");
        let n_actions = self.n_actions();
        self.goal_prior
            .iter()
            .enumerate()
            .map(|(g, &p)| {
                let row = &self.utilities[g * n_actions..(g + 1) * n_actions];
                let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                p * (best - row[action])
            })
            .sum()
    }

    /// Expected utilities, softmax policy, regret matrix, per-action expected
    /// regret, and the policy-maximizing action (lowest index among ties).
    pub fn evaluate_policy(&self, alpha: f64) -> Result<PolicyEvaluation> {
        let eu = self.expected_utility();
        let policy = softmax_policy(&eu, alpha)?;
        // Softmax is strictly monotone in EU, so the EU argmax is the policy
        // argmax; scanning with a strict `>` keeps the lowest tied index.
        let mut best_action = 0;
        for (a, &e) in eu.iter().enumerate() {
            if e > eu[best_action] {
                best_action = a;
            }
        }
        let regret = self.regret_matrix();
        let exp_regret: Vec<f64> = (0..self.n_actions())
            .map(|a| {
                self.goal_prior
                    .iter()
                    .enumerate()
                    .map(|(g, &p)| p * regret.get(g, a))
                    .sum()
            })
            .collect();
        Ok(PolicyEvaluation {
            eu,
            policy,
            best_action,
            regret,
            exp_regret,
        })
    }

    /// Full response distribution: the clarification probability comes from
    /// the logistic gate on the best action's expected regret, and the rest
    /// of the mass is allocated over actions by the softmax policy.
    pub fn response_distribution(&self, alpha: f64, tau: f64, c: f64) -> Result<ResponseDistribution> {
        let eval = self.evaluate_policy(alpha)?;
        let p_cq = cq_probability_logistic(eval.exp_regret[eval.best_action], tau, c);
        Ok(ResponseDistribution::from_gate_and_policy(p_cq, &eval.policy))
    }

    /// Policy-weighted average of per-action expected regrets.
    pub fn eer_aggregate(&self, alpha: f64) -> Result<f64> {
        let eval = self.evaluate_policy(alpha)?;
        Ok(eval
            .policy
            .iter()
            .zip(&eval.exp_regret)
            .map(|(&pi, &er)| pi * er)
            .sum())
    }
}

/// All derived decision quantities for one problem at one rationality level.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyEvaluation {
    /// Per-action expected utility.
    pub eu: Vec<f64>,
    /// Softmax policy over actions.
    pub policy: Vec<f64>,
    /// Policy-maximizing action; lowest index among ties.
    pub best_action: usize,
    /// (goal, action) regret matrix.
    pub regret: GoalActionMatrix,
    /// Per-action prior-weighted regret.
    pub exp_regret: Vec<f64>,
}

/// Mixture over asking a clarification question and acting directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseDistribution {
    /// Probability of asking the clarification question.
    pub p_cq: f64,
    /// Per-action probability, in the decision problem's action order.
    pub p_action: Vec<f64>,
}

impl ResponseDistribution {
    pub(crate) fn from_gate_and_policy(p_cq: f64, policy: &[f64]) -> Self {
        let p_action = policy.iter().map(|&pi| (1.0 - p_cq) * pi).collect();
        Self { p_cq, p_action }
    }

    /// Total probability mass; 1 up to rounding.
    pub fn total(&self) -> f64 {
        self.p_cq + self.p_action.iter().sum::<f64>()
    }
}

/// Softmax policy pi(a) proportional to exp(alpha * eu[a]).
///
/// Computed with max-subtraction, so alpha * eu magnitudes up to the
/// exp-overflow range are safe.
pub fn softmax_policy(eu: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if eu.is_empty() {
        return Err(Error::NonFinite("softmax over empty slice".into()));
    }
    if let Some(bad) = eu.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("softmax input {bad}")));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::NonFinite(format!(
            "softmax rationality parameter {alpha}"
        )));
    }
    let scaled: Vec<f64> = eu.iter().map(|&e| alpha * e).collect();
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scaled.iter().map(|&s| (s - max).exp()).collect();
    let norm: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / norm).collect())
}

/// Logistic gate from expected regret to clarification probability:
/// (1 + exp(-tau * (x - c)))^-1.
pub fn cq_probability_logistic(exp_regret_best: f64, tau: f64, c: f64) -> f64 {
    1.0 / (1.0 + (-tau * (exp_regret_best - c)).exp())
}

/// Power-law gate used by the aggregate-regret model variant:
/// clamp((eer / c)^tau, 0, 1). Errors when c = 0 (undefined base).
pub fn cq_probability_powerlaw(eer: f64, tau: f64, c: f64) -> Result<f64> {
    if c == 0.0 {
        return Err(Error::InvalidParams(
            "power-law gate location c must be nonzero".into(),
        ));
    }
    Ok((eer / c).powf(tau).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp(prior: Vec<f64>, rows: Vec<Vec<f64>>) -> DecisionProblem {
        let goals = (0..prior.len()).map(|i| format!("g{}", i + 1)).collect();
        let actions = (0..rows[0].len()).map(|i| format!("a{}", i + 1)).collect();
        DecisionProblem::new(goals, prior, actions, rows).unwrap()
    }

    /// The two-goal, three-action problem from the response-choice setting:
    /// actions ordered (ms1, ms2, exh).
    fn answering_dp(epsilon: f64, delta: f64) -> DecisionProblem {
        dp(
            vec![1.0 - epsilon, epsilon],
            vec![vec![1.0, 0.0, 1.0 - delta], vec![0.0, 1.0, 1.0 - delta]],
        )
    }

    #[test]
    fn rejects_invalid_construction() {
        let bad_prior = DecisionProblem::new(
            vec!["g1".into()],
            vec![0.7],
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0]],
        );
        assert!(bad_prior.is_err());

        let one_action = DecisionProblem::new(
            vec!["g1".into()],
            vec![1.0],
            vec!["a".into()],
            vec![vec![0.0]],
        );
        assert!(one_action.is_err());

        let ragged = DecisionProblem::new(
            vec!["g1".into(), "g2".into()],
            vec![0.5, 0.5],
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![0.0]],
        );
        assert!(ragged.is_err());

        let nonfinite = DecisionProblem::new(
            vec!["g1".into()],
            vec![1.0],
            vec!["a".into(), "b".into()],
            vec![vec![f64::NAN, 1.0]],
        );
        assert!(nonfinite.is_err());
    }

    #[test]
    fn expected_utility_degenerate_prior() {
        let p = answering_dp(0.0, 0.5);
        assert_eq!(p.expected_utility(), vec![1.0, 0.0, 0.5]);
    }

    #[test]
    fn expected_utility_hand_arithmetic() {
        let p = answering_dp(0.49, 0.32);
        let eu = p.expected_utility();
        assert!((eu[0] - 0.51).abs() < 1e-12);
        assert!((eu[1] - 0.49).abs() < 1e-12);
        assert!((eu[2] - 0.68).abs() < 1e-12);
    }

    #[test]
    fn expected_utility_symmetric_costless() {
        let p = answering_dp(0.5, 0.0);
        let eu = p.expected_utility();
        assert!((eu[0] - 0.5).abs() < 1e-12);
        assert!((eu[1] - 0.5).abs() < 1e-12);
        assert!((eu[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_zero_alpha_is_uniform() {
        let pi = softmax_policy(&[3.0, -1.0, 0.2], 0.0).unwrap();
        for p in pi {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_hand_arithmetic() {
        // exp(2.55), exp(2.45), exp(3.40), normalized.
        let pi = softmax_policy(&[0.51, 0.49, 0.68], 5.0).unwrap();
        assert!((pi[0] - 0.2356).abs() < 1e-3, "pi = {pi:?}");
        assert!((pi[1] - 0.2132).abs() < 1e-3);
        assert!((pi[2] - 0.5512).abs() < 1e-3);
    }

    #[test]
    fn softmax_sharp_alpha_concentrates() {
        let pi = softmax_policy(&[0.51, 0.49, 0.68], 50.0).unwrap();
        assert!(pi[2] > 0.999, "pi = {pi:?}");
    }

    #[test]
    fn softmax_rejects_non_finite() {
        assert!(softmax_policy(&[f64::INFINITY, 0.0], 1.0).is_err());
        assert!(softmax_policy(&[0.0, 1.0], f64::NAN).is_err());
    }

    #[test]
    fn softmax_survives_large_scale() {
        // alpha * eu spans +-700; max-subtraction keeps this finite.
        let pi = softmax_policy(&[-1.0, 1.0], 700.0).unwrap();
        assert!(pi.iter().all(|p| p.is_finite()));
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pi[1] > 0.999_999);
    }

    #[test]
    fn regret_matrix_own_goal_best_action() {
        let p = answering_dp(0.49, 0.32);
        let r = p.regret_matrix();
        assert_eq!(r.get(0, 0), 0.0); // ms1 is optimal for g1
        assert!((r.get(0, 2) - 0.32).abs() < 1e-12); // 1 - 0.68
        assert!((r.get(1, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regret_matrix_costless_exhaustive() {
        let p = answering_dp(0.3, 0.0);
        let r = p.regret_matrix();
        assert_eq!(r.get(0, 2), 0.0);
        assert_eq!(r.get(1, 2), 0.0);
    }

    #[test]
    fn expected_regret_hand_arithmetic() {
        let p = answering_dp(0.49, 0.32);
        assert!((p.expected_regret(0) - 0.49).abs() < 1e-12);
        // Exhaustive regret is the answer cost under every goal.
        assert!((p.expected_regret(2) - 0.32).abs() < 1e-12);
        let sure = answering_dp(0.0, 0.5);
        assert_eq!(sure.expected_regret(0), 0.0);
    }

    #[test]
    fn logistic_gate_midpoint_and_flat() {
        assert_eq!(cq_probability_logistic(0.18, 3.6, 0.18), 0.5);
        assert_eq!(cq_probability_logistic(0.9, 0.0, 0.18), 0.5);
        let p = cq_probability_logistic(0.32, 3.60, 0.18);
        assert!((p - 0.6234).abs() < 1e-3, "p = {p}");
    }

    #[test]
    fn evaluate_policy_best_action_cases() {
        let eval = answering_dp(0.49, 0.32).evaluate_policy(5.0).unwrap();
        assert_eq!(eval.best_action, 2);

        // alpha = 0 leaves the policy uniform; ties resolve to index 0 via EU
        // only when EU itself ties, so use a symmetric problem.
        let sym = answering_dp(0.5, 0.5).evaluate_policy(0.0).unwrap();
        assert_eq!(sym.best_action, 0);

        let sure = answering_dp(0.0, 0.5).evaluate_policy(3.0).unwrap();
        assert_eq!(sure.best_action, 0);
    }

    #[test]
    fn evaluate_policy_exp_regret_consistency() {
        let p = answering_dp(0.37, 0.18);
        let eval = p.evaluate_policy(4.0).unwrap();
        for a in 0..p.n_actions() {
            assert!((eval.exp_regret[a] - p.expected_regret(a)).abs() < 1e-12);
            assert!(eval.exp_regret[a] >= 0.0);
        }
    }

    #[test]
    fn response_distribution_hand_arithmetic() {
        let rd = answering_dp(0.49, 0.32)
            .response_distribution(5.0, 3.6, 0.18)
            .unwrap();
        assert!((rd.p_cq - 0.6234).abs() < 1e-3);
        assert!((rd.p_action[0] - 0.0887).abs() < 1e-3);
        assert!((rd.p_action[1] - 0.0803).abs() < 1e-3);
        assert!((rd.p_action[2] - 0.2076).abs() < 1e-3);
        assert!((rd.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn response_distribution_tied_mention_some() {
        // Both mention-some actions tie at expected regret 0.5 when the
        // exhaustive answer is worthless, so the gate value is tie-break-free.
        let rd = answering_dp(0.5, 1.0)
            .response_distribution(5.0, 3.6, 0.18)
            .unwrap();
        assert!((rd.p_cq - 0.7598).abs() < 1e-3, "p_cq = {}", rd.p_cq);
    }

    #[test]
    fn eer_aggregate_uniform_policy() {
        let v = answering_dp(0.5, 0.0).eer_aggregate(0.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = answering_dp(0.0, 0.5).eer_aggregate(0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eer_aggregate_sharp_limit_matches_best_action() {
        let p = answering_dp(0.49, 0.32);
        let eval = p.evaluate_policy(200.0).unwrap();
        let eer = p.eer_aggregate(200.0).unwrap();
        assert!((eer - eval.exp_regret[eval.best_action]).abs() < 1e-6);
    }

    #[test]
    fn powerlaw_gate_cases() {
        assert!((cq_probability_powerlaw(1.0 / 6.0, 1.0, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(cq_probability_powerlaw(0.5, 3.0, 0.5).unwrap(), 1.0);
        assert_eq!(cq_probability_powerlaw(0.0, 2.0, 0.5).unwrap(), 0.0);
        assert_eq!(cq_probability_powerlaw(0.3, 0.0, 0.5).unwrap(), 1.0);
        assert!(cq_probability_powerlaw(0.3, 1.0, 0.0).is_err());
    }
}
