//! Winning-probability evaluation.
//!
//! Three routes are provided and cross-checked against each other in tests:
//! closed-form threshold distributions ([`exact`]), exhaustive enumeration of
//! sample outcomes ([`oracle`]), and Rao-Blackwellized Monte Carlo
//! ([`monte_carlo`]). All of them reduce to averaging the exact win
//! probability of a fixed threshold, [`threshold_win_prob`], over the law of
//! the threshold.

use serde::Serialize;

use crate::scalar::Scalar;

pub mod deviation;
pub mod exact;
pub mod monte_carlo;
pub mod oracle;
pub mod stats;

pub use deviation::{deviation_trace, deviation_trace_from_stats, true_istar, DeviationTrace};
pub use exact::{
    asls_threshold_distribution, exact_threshold_distribution, fls_threshold_distribution,
    flsr_threshold_distribution_exact, policy_win_prob_exact, single_sample_threshold_distribution,
    threshold_win_prob, win_prob_profile,
};
pub use monte_carlo::{monte_carlo_win_prob, CI_MULTIPLIER};
pub use oracle::{brute_force_win_prob, ORACLE_BIT_CAP};
pub use stats::{draw_qhat_statistics, qhat_statistics, QHatStatistics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Oracle,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Oracle => "oracle",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// A winning probability together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult<F> {
    pub estimate: F,
    pub method: Method,
    /// Half-width of the 95% normal-approximation interval; 0 unless
    /// `method` is Monte Carlo.
    pub ci_halfwidth: F,
    pub replicates: usize,
    /// 0 unless `method` is Monte Carlo.
    pub seed: u64,
}

impl<F: Scalar> EvalResult<F> {
    // Rounding can push a sum of probabilities a few ulps outside [0, 1].
    fn clamp(x: F) -> F {
        x.max(F::zero()).min(F::one())
    }

    pub fn exact(estimate: F) -> Self {
        Self {
            estimate: Self::clamp(estimate),
            method: Method::Exact,
            ci_halfwidth: F::zero(),
            replicates: 0,
            seed: 0,
        }
    }

    pub fn oracle(estimate: F) -> Self {
        Self {
            method: Method::Oracle,
            ..Self::exact(estimate)
        }
    }

    pub fn monte_carlo(estimate: F, ci_halfwidth: F, replicates: usize, seed: u64) -> Self {
        Self {
            estimate: Self::clamp(estimate),
            method: Method::MonteCarlo,
            ci_halfwidth,
            replicates,
            seed,
        }
    }
}
