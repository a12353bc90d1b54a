use crate::error::{Error, Result};
use crate::eval::{win_prob_profile, EvalResult};
use crate::model::{Instance, SampleMatrix};
use crate::policies::SamplePolicy;
use crate::scalar::Scalar;

/// Largest `n * m` the oracle enumerates (`2^22` sample matrices).
pub const ORACLE_BIT_CAP: usize = 22;

/// Exact winning probability by enumerating all `2^(n m)` sample matrices.
///
/// Each outcome is weighted by its probability and contributes the expected
/// win probability of the threshold law the policy assigns to it (averaging
/// over any internal coin of the policy).
pub fn brute_force_win_prob<F: Scalar, P: SamplePolicy<F> + ?Sized>(
    instance: &Instance<F>,
    policy: &P,
    m: usize,
) -> Result<EvalResult<F>> {
    let n = instance.n();
    let bits = n.checked_mul(m).filter(|&b| m >= 1 && b <= ORACLE_BIT_CAP);
    let Some(bits) = bits else {
        return Err(Error::EnumerationTooLarge {
            bits: n.saturating_mul(m),
            cap: ORACLE_BIT_CAP,
        });
    };
    let w = win_prob_profile(instance);
    let probs = instance.probs();
    let mut total = F::zero();
    let mut cells = vec![false; bits];
    for mask in 0u64..1 << bits {
        let mut weight = F::one();
        for (k, cell) in cells.iter_mut().enumerate() {
            *cell = mask >> k & 1 == 1;
            let p = probs[k % n];
            weight = weight * if *cell { p } else { F::one() - p };
        }
        if weight == F::zero() {
            continue;
        }
        let samples = SampleMatrix::new(m, n, cells.clone()).expect("shape is m x n");
        let dist = policy.threshold_distribution(&samples);
        let value = dist
            .support()
            .fold(F::zero(), |acc, (tau, mass)| acc + mass * w[tau.get() - 1]);
        total = total + weight * value;
    }
    Ok(EvalResult::oracle(total))
}
