//! Convergence diagnostics: split R-hat and bulk effective sample size.
//!
//! Degenerate inputs (zero within-chain variance) yield NaN rather than a
//! silently optimistic value; callers surface it as a flagged diagnostic.

/// Variance floor below which a chain is treated as constant.
const VAR_FLOOR: f64 = 1e-300;

/// Split R-hat across chains for one parameter.
///
/// Each chain is halved, then R-hat = sqrt(var_plus / W) over the half
/// chains, with var_plus = (n-1)/n W + B/n. Needs at least two chains of at
/// least four iterations; returns NaN on degenerate input.
pub fn split_r_hat(chains: &[&[f64]]) -> f64 {
    if chains.len() < 2 || chains.iter().any(|c| c.len() < 4) {
        return f64::NAN;
    }
    let mut halves: Vec<&[f64]> = Vec::with_capacity(chains.len() * 2);
    // Truncate to a common even length so all halves match.
    let n = chains.iter().map(|c| c.len()).min().unwrap() / 2 * 2;
    for chain in chains {
        let mid = n / 2;
        halves.push(&chain[..mid]);
        halves.push(&chain[mid..n]);
    }
    let m = halves.len() as f64;
    let len = (n / 2) as f64;

    let means: Vec<f64> = halves
        .iter()
        .map(|h| h.iter().sum::<f64>() / h.len() as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / m;
    let between: f64 =
        means.iter().map(|&x| (x - grand).powi(2)).sum::<f64>() * len / (m - 1.0);
    let within: f64 = halves
        .iter()
        .zip(&means)
        .map(|(h, &mu)| h.iter().map(|&x| (x - mu).powi(2)).sum::<f64>() / (h.len() as f64 - 1.0))
        .sum::<f64>()
        / m;

    if within < VAR_FLOOR {
        return f64::NAN;
    }
    let var_plus = (len - 1.0) / len * within + between / len;
    (var_plus / within).sqrt()
}

/// Bulk ESS: per-chain initial-monotone-sequence estimates, summed across
/// chains. NaN when every chain is (numerically) constant.
pub fn bulk_ess(chains: &[&[f64]]) -> f64 {
    if chains.is_empty() || chains.iter().any(|c| c.len() < 4) {
        return f64::NAN;
    }
    let per_chain: Vec<f64> = chains.iter().map(|c| chain_ess(c)).collect();
    if per_chain.iter().all(|e| e.is_nan()) {
        return f64::NAN;
    }
    per_chain.iter().filter(|e| !e.is_nan()).sum()
}

/// Single-chain ESS via Geyer's initial monotone positive sequence.
fn chain_ess(chain: &[f64]) -> f64 {
    let n = chain.len();
    let nf = n as f64;
    let mu = chain.iter().sum::<f64>() / nf;
    let var = chain.iter().map(|&x| (x - mu).powi(2)).sum::<f64>() / nf;
    if var < VAR_FLOOR {
        return f64::NAN;
    }

    let rho = |lag: usize| -> f64 {
        (0..n - lag)
            .map(|i| (chain[i] - mu) * (chain[i + lag] - mu))
            .sum::<f64>()
            / (nf * var)
    };

    // Pair sums Gamma_m = rho(2m) + rho(2m+1); keep while positive and
    // enforce monotone decrease, per Geyer's initial-sequence estimators.
    let mut pair_sum_total = 0.0;
    let mut prev = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let gamma = rho(lag) + rho(lag + 1);
        if gamma <= 0.0 {
            break;
        }
        let gamma = gamma.min(prev);
        pair_sum_total += gamma;
        prev = gamma;
        lag += 2;
    }
    // tau = -1 + 2 * sum Gamma_m laid out so that tau = 1 when draws are
    // independent (Gamma_0 alone = 1 + rho(1)).
    let tau = (2.0 * pair_sum_total - 1.0).max(1.0 / nf);
    nf / tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn gaussian_stream(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed, 0);
        let normal = Normal::new(0.0, 1.0).unwrap();
        (0..n).map(|_| normal.sample(&mut rng)).collect()
    }

    #[test]
    fn interleaved_halves_of_one_stream_converge() {
        let stream = gaussian_stream(4000, 11);
        let even: Vec<f64> = stream.iter().copied().step_by(2).collect();
        let odd: Vec<f64> = stream.iter().copied().skip(1).step_by(2).collect();
        let r = split_r_hat(&[&even, &odd]);
        assert!(r < 1.01, "r_hat = {r}");
    }

    #[test]
    fn offset_chains_diverge() {
        let a = gaussian_stream(500, 3);
        let b: Vec<f64> = gaussian_stream(500, 4).iter().map(|x| x + 50.0).collect();
        let r = split_r_hat(&[&a, &b]);
        assert!(r > 1.5, "r_hat = {r}");
    }

    #[test]
    fn constant_chains_are_flagged() {
        let a = vec![2.0; 100];
        let b = vec![2.0; 100];
        assert!(split_r_hat(&[&a, &b]).is_nan());
        assert!(bulk_ess(&[&a, &b]).is_nan());
    }

    #[test]
    fn iid_draws_have_near_nominal_ess() {
        let chain = gaussian_stream(4000, 21);
        let ess = bulk_ess(&[&chain]);
        assert!(
            (0.8 * 4000.0..=1.2 * 4000.0).contains(&ess),
            "ess = {ess}"
        );
    }

    #[test]
    fn ar1_chain_matches_analytic_ess() {
        // AR(1) with coefficient 0.9 has tau = (1 + 0.9) / (1 - 0.9) = 19.
        let n = 50_000;
        let phi: f64 = 0.9;
        let mut rng = seeded_rng(5, 0);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut chain = Vec::with_capacity(n);
        let mut x = 0.0;
        for _ in 0..n {
            x = phi * x + (1.0 - phi * phi).sqrt() * normal.sample(&mut rng);
            chain.push(x);
        }
        let expected = n as f64 * (1.0 - phi) / (1.0 + phi);
        let ess = bulk_ess(&[&chain]);
        assert!(
            ess > expected / 1.5 && ess < expected * 1.5,
            "ess = {ess}, expected about {expected}"
        );
    }

    #[test]
    fn four_draws_is_finite() {
        let a = [0.3, -0.1, 0.7, 0.2];
        let b = [0.1, 0.2, -0.5, 0.4];
        let ess = bulk_ess(&[&a, &b]);
        assert!(ess.is_finite() && ess >= 0.0);
        let r = split_r_hat(&[&a, &b]);
        assert!(r.is_finite());
    }

    #[test]
    fn chain_permutation_invariance() {
        let a = gaussian_stream(800, 31);
        let b = gaussian_stream(800, 32);
        let c: Vec<f64> = gaussian_stream(800, 33).iter().map(|x| x * 1.1).collect();
        let fwd = [&a[..], &b[..], &c[..]];
        let rev = [&c[..], &a[..], &b[..]];
        assert_eq!(split_r_hat(&fwd), split_r_hat(&rev));
        assert_eq!(bulk_ess(&fwd), bulk_ess(&rev));
    }

    #[test]
    fn uniform_iid_ess_tracks_sample_size() {
        let mut rng = seeded_rng(8, 0);
        let chain: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let ess = bulk_ess(&[&chain]);
        assert!((0.8 * 2000.0..=1.2 * 2000.0).contains(&ess), "ess = {ess}");
    }
}
