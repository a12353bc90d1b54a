use crate::error::{Error, Result};
use crate::eval::EvalResult;
use crate::model::{Instance, ThresholdDistribution, ThresholdIndex};
use crate::policies::Policy;
use crate::scalar::Scalar;

/// Probability that threshold `tau` wins, i.e. that exactly one of
/// `X_tau..X_n` is a success. `tau = n + 1` never stops and returns 0.
///
/// Evaluated by the right-to-left recursion on (no success, exactly one
/// success) in the suffix, which needs no division and so handles `p_j = 1`
/// exactly: two certain successes give 0, one gives the product over the rest.
pub fn threshold_win_prob<F: Scalar>(instance: &Instance<F>, tau: ThresholdIndex) -> F {
    let start = tau.get() - 1;
    let (_, one) = instance.probs()[start.min(instance.n())..]
        .iter()
        .rev()
        .fold((F::one(), F::zero()), |(none, one), &p| {
            ((F::one() - p) * none, p * none + (F::one() - p) * one)
        });
    one
}

/// `W(1)..W(n+1)` in one pass; `W(n+1) = 0`.
pub fn win_prob_profile<F: Scalar>(instance: &Instance<F>) -> Vec<F> {
    let n = instance.n();
    let mut out = vec![F::zero(); n + 1];
    let (mut none, mut one) = (F::one(), F::zero());
    for i in (0..n).rev() {
        let p = instance.probs()[i];
        one = p * none + (F::one() - p) * one;
        none = (F::one() - p) * none;
        out[i] = one;
    }
    out
}

/// Law of the last success index `L` of one sample sequence: `P(L = 0) = Q_1`
/// and `P(L = k) = p_k Q_{k+1}`.
fn last_success_law<F: Scalar>(instance: &Instance<F>) -> Vec<F> {
    let summary = instance.odds_summary();
    let mut law = Vec::with_capacity(instance.n() + 1);
    law.push(summary.q(1));
    law.extend((1..=instance.n()).map(|k| instance.p(k) * summary.q(k + 1)));
    law
}

/// Threshold law of FLS under one sample sequence.
pub fn fls_threshold_distribution<F: Scalar>(instance: &Instance<F>) -> ThresholdDistribution<F> {
    let law = last_success_law(instance);
    let mut masses = law[1..].to_vec();
    masses.push(F::zero());
    // No sample success also maps to tau = 1.
    masses[0] = masses[0] + law[0];
    ThresholdDistribution::from_masses(masses).expect("last-success law sums to one")
}

/// Threshold law of ASLS: `P(tau = k) = p_{k-1} W(k)` for `k >= 2` (a success
/// at `k - 1` followed by exactly one more), and `P(tau = 1)` is the chance of
/// at most one sample success.
pub fn asls_threshold_distribution<F: Scalar>(instance: &Instance<F>) -> ThresholdDistribution<F> {
    let n = instance.n();
    let w = win_prob_profile(instance);
    let mut masses = vec![F::zero(); n + 1];
    masses[0] = instance.odds_summary().q(1) + w[0];
    for k in 2..=n {
        masses[k - 1] = instance.p(k - 1) * w[k - 1];
    }
    ThresholdDistribution::from_masses(masses).expect("ASLS law sums to one")
}

/// Threshold law of FLSR with the fair coin marginalized out.
pub fn flsr_threshold_distribution_exact<F: Scalar>(
    instance: &Instance<F>,
) -> ThresholdDistribution<F> {
    let n = instance.n();
    let law = last_success_law(instance);
    let half = F::half();
    let mut masses = vec![F::zero(); n + 1];
    masses[0] = law[0] + half * law[1];
    for k in 2..=n {
        masses[k - 1] = half * law[k] + half * law[k - 1];
    }
    masses[n] = half * law[n];
    ThresholdDistribution::from_masses(masses).expect("FLSR law sums to one")
}

/// Largest number of non-degenerate trials [`single_sample_threshold_distribution`]
/// will branch on.
pub const ENUMERATION_BIT_CAP: usize = 22;

/// Threshold law of any single-sample policy by enumerating the sample rows
/// with positive probability. Trials with `p` in `{0, 1}` do not branch, so
/// the cost is `2^k` for `k` non-degenerate trials.
pub fn single_sample_threshold_distribution<F: Scalar>(
    instance: &Instance<F>,
    policy: &Policy<F>,
) -> Result<ThresholdDistribution<F>> {
    let branching = instance
        .probs()
        .iter()
        .filter(|&&p| p > F::zero() && p < F::one())
        .count();
    if branching > ENUMERATION_BIT_CAP {
        return Err(Error::EnumerationTooLarge {
            bits: branching,
            cap: ENUMERATION_BIT_CAP,
        });
    }
    let n = instance.n();
    let mut masses = vec![F::zero(); n + 1];
    let mut row = vec![false; n];
    enumerate_rows(
        instance.probs(),
        0,
        F::one(),
        &mut row,
        &mut |row, weight| {
            for (tau, mass) in policy.row_distribution(row).support() {
                masses[tau.get() - 1] = masses[tau.get() - 1] + weight * mass;
            }
        },
    );
    ThresholdDistribution::from_masses(masses)
}

fn enumerate_rows<F: Scalar>(
    probs: &[F],
    i: usize,
    weight: F,
    row: &mut Vec<bool>,
    visit: &mut impl FnMut(&[bool], F),
) {
    if i == probs.len() {
        visit(row, weight);
        return;
    }
    let p = probs[i];
    if p > F::zero() {
        row[i] = true;
        enumerate_rows(probs, i + 1, weight * p, row, visit);
    }
    if p < F::one() {
        row[i] = false;
        enumerate_rows(probs, i + 1, weight * (F::one() - p), row, visit);
    }
}

/// Exact threshold law for a single-sample policy: closed forms for FLS,
/// ASLS and FLSR, row enumeration for estimated-Bruss. The multi-sample rule
/// has no exact evaluator; use the oracle or Monte Carlo.
pub fn exact_threshold_distribution<F: Scalar>(
    instance: &Instance<F>,
    policy: &Policy<F>,
) -> Result<ThresholdDistribution<F>> {
    match policy {
        Policy::Fls => Ok(fls_threshold_distribution(instance)),
        Policy::Asls => Ok(asls_threshold_distribution(instance)),
        Policy::Flsr => Ok(flsr_threshold_distribution_exact(instance)),
        Policy::EstimatedBruss(_) => single_sample_threshold_distribution(instance, policy),
        Policy::MultiSample(_) => Err(Error::NoExactForm("the multi-sample policy")),
    }
}

/// `sum_k P(tau = k) W(k)`. Valid because samples are independent of the
/// trials they are drawn for.
pub fn policy_win_prob_exact<F: Scalar>(
    instance: &Instance<F>,
    dist: &ThresholdDistribution<F>,
) -> Result<EvalResult<F>> {
    if dist.n() != instance.n() {
        return Err(Error::DimensionMismatch {
            instance: instance.n(),
            samples: dist.n(),
        });
    }
    let w = win_prob_profile(instance);
    let terms: Vec<F> = dist.masses().iter().zip(&w).map(|(&m, &v)| m * v).collect();
    Ok(EvalResult::exact(crate::scalar::pairwise_sum(&terms)))
}
