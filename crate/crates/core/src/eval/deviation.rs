use crate::error::{Error, Result};
use crate::eval::{qhat_statistics, QHatStatistics};
use crate::model::{Instance, SampleMatrix};
use crate::scalar::Scalar;

/// Relative estimation errors `D_k = (Q_k - Q_hat_k) / Q_k` for
/// `k = i* + 1..=n`, where `i* = min { i : Q_{i+1} >= 1/e }`.
///
/// Over that range the `D_k`, read from `k = n` downwards, form a
/// martingale, which is what makes `max_k D_k` controllable.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationTrace<F> {
    istar: usize,
    entries: Vec<(usize, F)>,
}

impl<F: Scalar> DeviationTrace<F> {
    pub fn istar(&self) -> usize {
        self.istar
    }

    /// `(k, D_k)` pairs in increasing `k`.
    pub fn entries(&self) -> &[(usize, F)] {
        &self.entries
    }

    pub fn dvalues(&self) -> impl Iterator<Item = F> + '_ {
        self.entries.iter().map(|&(_, d)| d)
    }

    pub fn get(&self, k: usize) -> Option<F> {
        self.entries.iter().find(|&&(i, _)| i == k).map(|&(_, d)| d)
    }

    /// `max_{k > i*} D_k`, or `None` when `i* = n`.
    pub fn max(&self) -> Option<F> {
        self.dvalues().reduce(F::max)
    }
}

/// `i*` of an instance, with `Q_{n+1} = 1`.
pub fn true_istar<F: Scalar>(instance: &Instance<F>) -> usize {
    let s = instance.odds_summary();
    (1..=instance.n())
        .find(|&i| s.q(i + 1) >= F::inv_e())
        .unwrap_or(instance.n())
}

pub fn deviation_trace<F: Scalar>(
    instance: &Instance<F>,
    samples: &SampleMatrix,
) -> Result<DeviationTrace<F>> {
    deviation_trace_from_stats(instance, &qhat_statistics(samples))
}

/// Same as [`deviation_trace`] from precomputed counts.
pub fn deviation_trace_from_stats<F: Scalar>(
    instance: &Instance<F>,
    stats: &QHatStatistics<F>,
) -> Result<DeviationTrace<F>> {
    if stats.n() != instance.n() {
        return Err(Error::DimensionMismatch {
            instance: instance.n(),
            samples: stats.n(),
        });
    }
    let s = instance.odds_summary();
    let istar = true_istar(instance);
    // Q_k >= Q_{i*+1} >= 1/e on this range, so the filter only guards rounding.
    let entries = (istar + 1..=instance.n())
        .filter(|&k| s.q(k) > F::zero())
        .map(|k| (k, (s.q(k) - stats.q_hat(k)) / s.q(k)))
        .collect();
    Ok(DeviationTrace { istar, entries })
}
