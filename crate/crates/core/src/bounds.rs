//! Closed-form guarantee and impossibility curves, as functions of the sum
//! of odds `R`. Used as test oracles and for plotting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::policies::default_epsilon;
use crate::scalar::Scalar;

/// A point on a bound curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCurvePoint<F> {
    pub r_value: F,
    pub bound: F,
}

/// One row of the ASLS guarantee plot: the lower bound for ASLS and the
/// best achievable value for any single-sample policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure2Row<F> {
    pub r_value: F,
    pub asls_bound: F,
    pub upper_bound: F,
}

/// Optimal full-information winning probability over instances with sum of
/// odds at least `R`: `R e^{-R}` for `R <= 1`, `1/e` beyond (including `inf`).
pub fn opt_bound<F: Scalar>(r: F) -> F {
    if r <= F::one() {
        r * (-r).exp()
    } else {
        F::inv_e()
    }
}

/// `(e^{-R}, 1/(1+R))`, the sandwich on the no-success probability; both are
/// 0 at `R = inf`.
pub fn lemma1_bounds<F: Scalar>(r: F) -> (F, F) {
    ((-r).exp(), (F::one() + r).recip())
}

/// `(sqrt(3) - 1) / 2`, where the ASLS bound reaches 1/4.
pub fn asls_junction<F: Scalar>() -> F {
    (F::lit(3.0).sqrt() - F::one()) / F::lit(2.0)
}

/// ASLS guarantee: `R (4 + 3R) / (4 (1 + R)^2)` below the junction, 1/4 above.
pub fn asls_lower_bound<F: Scalar>(r: F) -> F {
    if r >= asls_junction() {
        F::quarter()
    } else {
        let one_r = F::one() + r;
        r * (F::lit(4.0) + F::lit(3.0) * r) / (F::lit(4.0) * one_r * one_r)
    }
}

/// FLSR guarantee: `1/4 - (1 - 2R) / (4 (1 + R)^2)` below `R = 1/2`, 1/4 above.
pub fn flsr_lower_bound<F: Scalar>(r: F) -> F {
    if r >= F::half() {
        F::quarter()
    } else {
        let one_r = F::one() + r;
        F::quarter() - (F::one() - F::lit(2.0) * r) / (F::lit(4.0) * one_r * one_r)
    }
}

/// Best value any single-sample policy can guarantee: `min(OPT(R), 1/4)`.
pub fn single_sample_upper_bound<F: Scalar>(r: F) -> F {
    opt_bound(r).min(F::quarter())
}

/// `(1 - e^{-4}) / 4`, the worst-case limit of FLS.
pub fn fls_limit<F: Scalar>() -> F {
    (F::one() - F::lit(-4.0).exp()) / F::lit(4.0)
}

/// Root of `x e^{-x} = 1/4` in `(0, 1)`, by 200 bisection steps on
/// `[0.1, 0.9]`. `x e^{-x}` increases up to `x = 1` and `1/4 < 1/e`, so the
/// bracket holds exactly one root.
pub fn alpha_crossover<F: Scalar>() -> F {
    let f = |x: F| x * (-x).exp() - F::quarter();
    let (mut lo, mut hi) = (F::lit(0.1), F::lit(0.9));
    for _ in 0..200 {
        let mid = (lo + hi) * F::half();
        if f(mid) < F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * F::half()
}

/// Explicit guarantee of the multi-sample policy with the default epsilon:
/// `max(0, OPT(R) - 4 eps(m))`.
pub fn multi_sample_guarantee<F: Scalar>(m: usize, r: F) -> F {
    (opt_bound(r) - F::lit(4.0) * default_epsilon::<F>(m)).max(F::zero())
}

fn grid<F: Scalar>(step: F, r_max: F) -> Result<impl Iterator<Item = F>> {
    if !(step > F::zero() && step.is_finite()) || !(r_max > F::zero() && r_max.is_finite()) {
        return Err(Error::InvalidParameter(
            "step and r_max must be positive and finite".into(),
        ));
    }
    // The nudge keeps r_max itself on the grid when r_max / step rounds just below an integer.
    let last = (r_max / step + F::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    Ok((0..=last).map(move |k| F::from_count(k) * step))
}

/// Samples `bound` at `R = 0, step, 2 step, ..` up to `r_max`.
pub fn sample_curve<F: Scalar>(
    bound: impl Fn(F) -> F,
    step: F,
    r_max: F,
) -> Result<Vec<BoundCurvePoint<F>>> {
    Ok(grid(step, r_max)?
        .map(|r| BoundCurvePoint {
            r_value: r,
            bound: bound(r),
        })
        .collect())
}

/// Grid of the ASLS bound against the single-sample upper bound,
/// `floor(r_max / step) + 1` rows starting at `R = 0`.
pub fn figure2_data<F: Scalar>(step: F, r_max: F) -> Result<Vec<Figure2Row<F>>> {
    Ok(grid(step, r_max)?
        .map(|r| Figure2Row {
            r_value: r,
            asls_bound: asls_lower_bound(r),
            upper_bound: single_sample_upper_bound(r),
        })
        .collect())
}
