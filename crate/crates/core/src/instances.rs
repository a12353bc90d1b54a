//! Instance families: the extremal constructions used in the worst-case
//! arguments, the classical secretary instance, and random instances with a
//! prescribed sum of odds.

use rand::distr::Distribution;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rng::seeded_rng;
use crate::scalar::Scalar;

fn need_trials(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    Ok(())
}

/// `(1, 0, .., 0)`: the only success is the first trial.
pub fn one_then_zeros<F: Scalar>(n: usize) -> Result<Instance<F>> {
    need_trials(n)?;
    let mut p = vec![F::zero(); n];
    p[0] = F::one();
    Instance::new(p)
}

/// `(1, 2/n, .., 2/n)` for `n >= 3`.
pub fn one_then_uniform<F: Scalar>(n: usize) -> Result<Instance<F>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "one-then-uniform needs n >= 3, got {n}"
        )));
    }
    let mut p = vec![F::lit(2.0) / F::from_count(n); n];
    p[0] = F::one();
    Instance::new(p)
}

/// `p_i = 1/i`: the classical secretary problem as a last-success problem.
pub fn secretary<F: Scalar>(n: usize) -> Result<Instance<F>> {
    need_trials(n)?;
    Instance::new((1..=n).map(|i| F::from_count(i).recip()).collect())
}

/// `p_1 = .. = p_j = 1`, the rest 0. Only threshold `j` wins.
pub fn staircase<F: Scalar>(n: usize, j: usize) -> Result<Instance<F>> {
    if j == 0 || j > n {
        return Err(Error::InvalidParameter(format!(
            "staircase needs 1 <= j <= n, got j = {j}, n = {n}"
        )));
    }
    Instance::new(
        (1..=n)
            .map(|i| if i <= j { F::one() } else { F::zero() })
            .collect(),
    )
}

pub fn two_trial<F: Scalar>(p1: F, p2: F) -> Result<Instance<F>> {
    Instance::new(vec![p1, p2])
}

pub fn iid_instance<F: Scalar>(n: usize, p: F) -> Result<Instance<F>> {
    need_trials(n)?;
    Instance::new(vec![p; n])
}

/// Random instance whose odds sum to `r_target`: odds are `r_target` times a
/// uniform point of the simplex (normalized standard exponentials) and
/// `p_i = r_i / (1 + r_i)`.
pub fn random_with_total_odds<F: Scalar>(n: usize, r_target: F, seed: u64) -> Result<Instance<F>> {
    need_trials(n)?;
    if !(r_target > F::zero() && r_target.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target sum of odds must be positive and finite, got {r_target}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = draws.iter().sum();
    let r = r_target.as_f64();
    let probs = draws
        .iter()
        .map(|&e| {
            let odds = r * e / total;
            F::lit(odds / (1.0 + odds))
        })
        .collect();
    Instance::new(probs)
}
