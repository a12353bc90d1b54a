use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{draw_qhat_statistics, win_prob_profile, EvalResult};
use crate::model::Instance;
use crate::policies::{multi_sample_threshold, Policy};
use crate::rng::{replicate_seed, seeded_rng};
use crate::scalar::{pairwise_sum, Scalar};

/// Normal quantile used for the reported 95% interval.
pub const CI_MULTIPLIER: f64 = 1.96;

/// Rao-Blackwellized Monte Carlo estimate of a policy's winning probability.
///
/// Each replicate draws only what the policy looks at and then averages the
/// exact win probability of the resulting threshold instead of simulating the
/// trials:
///
/// * multi-sample rule: the no-success counts `T_i` for `m` sequences, drawn
///   by binomial thinning (see [`draw_qhat_statistics`]);
/// * single-sample rules: one sample row (the remaining `m - 1` rows would be
///   ignored by the policy and are not drawn).
///
/// Replicate `k` uses seed `replicate_seed(seed, k)` and the replicate values
/// are reduced by fixed-order pairwise summation, so the estimate is
/// bit-identical for any thread count.
pub fn monte_carlo_win_prob<F: Scalar>(
    instance: &Instance<F>,
    policy: &Policy<F>,
    m: usize,
    replicates: usize,
    seed: u64,
) -> Result<EvalResult<F>> {
    if m == 0 || replicates == 0 {
        return Err(Error::InvalidParameter(
            "m and replicates must be positive".into(),
        ));
    }
    let w = win_prob_profile(instance);
    let probs: Vec<f64> = instance.probs().iter().map(|p| p.as_f64()).collect();
    let values: Vec<F> = (0..replicates as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded_rng(replicate_seed(seed, k));
            match policy {
                Policy::MultiSample(params) => {
                    let stats = draw_qhat_statistics(instance, m, &mut rng);
                    w[multi_sample_threshold(&stats, params).get() - 1]
                }
                single => {
                    let row: Vec<bool> = probs.iter().map(|&p| rng.random::<f64>() < p).collect();
                    single
                        .row_distribution(&row)
                        .support()
                        .fold(F::zero(), |acc, (tau, mass)| acc + mass * w[tau.get() - 1])
                }
            }
        })
        .collect();

    let count = F::from_count(replicates);
    let mean = pairwise_sum(&values) / count;
    let ci = if replicates > 1 {
        let sq: Vec<F> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
        let sd = (pairwise_sum(&sq) / F::from_count(replicates - 1)).sqrt();
        F::lit(CI_MULTIPLIER) * sd / count.sqrt()
    } else {
        F::zero()
    };
    Ok(EvalResult::monte_carlo(mean, ci, replicates, seed))
}
