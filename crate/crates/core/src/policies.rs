//! Threshold rules.
//!
//! Every policy here first picks a threshold `tau` (possibly at random) and
//! then stops at the first success observed at or after trial `tau`. They
//! differ only in how `tau` is chosen: from the true odds, from a single
//! sample sequence, or from `m` sample sequences.

use std::fmt;

use crate::error::{Error, Result};
use crate::eval::QHatStatistics;
use crate::model::{
    last_two_success_indices, odds_of, OddsSummary, SampleMatrix, ThresholdDistribution,
    ThresholdIndex,
};
use crate::scalar::Scalar;

/// Smallest `t` in `1..=n` such that `sum_{i > t} r_i < 1`, scanning the odds
/// from the right. An infinite odd stops the scan.
fn bruss_from_odds<F: Scalar>(odds: &[F]) -> ThresholdIndex {
    let mut t = odds.len();
    let mut suffix = F::zero();
    while t > 1 && suffix + odds[t - 1] < F::one() {
        suffix = suffix + odds[t - 1];
        t -= 1;
    }
    ThresholdIndex::from_raw(t.max(1))
}

/// Bruss's odds rule on known probabilities.
pub fn bruss_threshold<F: Scalar>(summary: &OddsSummary<F>) -> ThresholdIndex {
    bruss_from_odds(summary.odds())
}

/// Point estimates used by the estimated-Bruss rule: `p_hat_i = alpha1` if the
/// sample shows a success at `i`, else `alpha0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationParams<F> {
    alpha0: F,
    alpha1: F,
}

impl<F: Scalar> EstimationParams<F> {
    pub fn new(alpha0: F, alpha1: F) -> Result<Self> {
        for (name, value) in [("alpha0", alpha0), ("alpha1", alpha1)] {
            if !(value >= F::zero() && value <= F::one()) {
                return Err(Error::InvalidAlpha {
                    name,
                    value: value.as_f64(),
                });
            }
        }
        Ok(Self { alpha0, alpha1 })
    }

    pub fn alpha0(&self) -> F {
        self.alpha0
    }

    pub fn alpha1(&self) -> F {
        self.alpha1
    }
}

/// Applies Bruss's rule to the probabilities estimated from one sample row.
pub fn estimated_bruss_threshold<F: Scalar>(
    row: &[bool],
    params: &EstimationParams<F>,
) -> ThresholdIndex {
    let (r0, r1) = (odds_of(params.alpha0), odds_of(params.alpha1));
    let odds: Vec<F> = row.iter().map(|&y| if y { r1 } else { r0 }).collect();
    bruss_from_odds(&odds)
}

/// From the Last Success: threshold at the last sample success, 1 if none.
pub fn fls_threshold(row: &[bool]) -> ThresholdIndex {
    let (last, _) = last_two_success_indices(row);
    ThresholdIndex::from_raw(last.max(1))
}

/// After the Second Last Success: one past the second-last sample success,
/// 1 if the row has fewer than two successes. Never exceeds the last success.
pub fn asls_threshold(row: &[bool]) -> ThresholdIndex {
    match last_two_success_indices(row) {
        (_, 0) => ThresholdIndex::FIRST,
        (_, second) => ThresholdIndex::from_raw(second + 1),
    }
}

/// From the Last Success, Randomized: the last sample success or its
/// successor with probability 1/2 each (the successor may be `n + 1`).
pub fn flsr_threshold_distribution<F: Scalar>(row: &[bool]) -> ThresholdDistribution<F> {
    let n = row.len();
    let (last, _) = last_two_success_indices(row);
    if last == 0 {
        return ThresholdDistribution::point(ThresholdIndex::FIRST, n);
    }
    let mut masses = vec![F::zero(); n + 1];
    masses[last - 1] = F::half();
    masses[last] = F::half();
    ThresholdDistribution::from_masses(masses).expect("two halves sum to one")
}

/// Margin `epsilon` of the multi-sample rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiSampleParams<F> {
    epsilon: F,
}

impl<F: Scalar> MultiSampleParams<F> {
    /// Accepts `0 < epsilon < min(1/2, 1 - 1/e)`.
    pub fn new(epsilon: F) -> Result<Self> {
        let upper = F::half().min(F::one() - F::inv_e());
        if !(epsilon > F::zero() && epsilon < upper) {
            return Err(Error::InvalidEpsilon(epsilon.as_f64()));
        }
        Ok(Self { epsilon })
    }

    /// Uses [`default_epsilon`] for `m` samples per trial.
    pub fn for_samples(m: usize) -> Self {
        Self {
            epsilon: default_epsilon(m),
        }
    }

    pub fn epsilon(&self) -> F {
        self.epsilon
    }
}

/// Largest epsilon returned by [`default_epsilon`].
pub const EPSILON_CLAMP: f64 = 0.499_999;

/// `epsilon = (e/m)^{1/4}`, i.e. the solution of `m = e / epsilon^4`, clamped
/// to [`EPSILON_CLAMP`] for `m <= 43` where the formula reaches 1/2.
pub fn default_epsilon<F: Scalar>(m: usize) -> F {
    let m = F::from_count(m.max(1));
    (F::E() / m).powf(F::quarter()).min(F::lit(EPSILON_CLAMP))
}

/// `i_hat = min { i in 1..=n : T_{i+1} >= m (1/e + epsilon) }`.
///
/// The comparison is done on the count side in floating point. `T_{i+1}` is
/// an integer and `m (1/e + eps)` is irrational for rational eps, so an exact
/// tie cannot occur; rounding at the representability boundary follows the
/// float comparison. Counts are non-decreasing, so the set is an up-set and a
/// left-to-right scan finds its minimum; `T_{n+1} = m` guarantees a hit.
pub fn multi_sample_threshold<F: Scalar>(
    stats: &QHatStatistics<F>,
    params: &MultiSampleParams<F>,
) -> ThresholdIndex {
    let n = stats.n();
    let cutoff = F::from_count(stats.m()) * (F::inv_e() + params.epsilon);
    let counts = stats.counts();
    let i_hat = (1..=n)
        .find(|&i| F::from_count(counts[i] as usize) >= cutoff)
        .unwrap_or(n);
    ThresholdIndex::from_raw(i_hat)
}

/// Any rule that maps sample sequences to a threshold distribution.
pub trait SamplePolicy<F: Scalar> {
    fn threshold_distribution(&self, samples: &SampleMatrix) -> ThresholdDistribution<F>;
}

/// The policies implemented by the crate.
///
/// Single-sample rules (`Fls`, `Asls`, `Flsr`, `EstimatedBruss`) read only
/// the first sample sequence when more than one is supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy<F> {
    Fls,
    Asls,
    Flsr,
    EstimatedBruss(EstimationParams<F>),
    MultiSample(MultiSampleParams<F>),
}

impl<F: Scalar> Policy<F> {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Fls => "fls",
            Policy::Asls => "asls",
            Policy::Flsr => "flsr",
            Policy::EstimatedBruss(_) => "estimated-bruss",
            Policy::MultiSample(_) => "multi-sample",
        }
    }

    pub fn is_single_sample(&self) -> bool {
        !matches!(self, Policy::MultiSample(_))
    }

    /// Threshold distribution from a single sample row.
    ///
    /// For the multi-sample rule the row is treated as `m = 1`.
    pub fn row_distribution(&self, row: &[bool]) -> ThresholdDistribution<F> {
        let n = row.len();
        match self {
            Policy::Fls => ThresholdDistribution::point(fls_threshold(row), n),
            Policy::Asls => ThresholdDistribution::point(asls_threshold(row), n),
            Policy::Flsr => flsr_threshold_distribution(row),
            Policy::EstimatedBruss(params) => {
                ThresholdDistribution::point(estimated_bruss_threshold(row, params), n)
            }
            Policy::MultiSample(params) => {
                let samples = SampleMatrix::new(1, n, row.to_vec()).expect("row has n > 0 entries");
                ThresholdDistribution::point(
                    multi_sample_threshold(&crate::eval::qhat_statistics(&samples), params),
                    n,
                )
            }
        }
    }
}

impl<F: Scalar> SamplePolicy<F> for Policy<F> {
    fn threshold_distribution(&self, samples: &SampleMatrix) -> ThresholdDistribution<F> {
        match self {
            Policy::MultiSample(params) => ThresholdDistribution::point(
                multi_sample_threshold(&crate::eval::qhat_statistics(samples), params),
                samples.n(),
            ),
            single => single.row_distribution(samples.row(0)),
        }
    }
}

impl<F: Scalar> fmt::Display for Policy<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
