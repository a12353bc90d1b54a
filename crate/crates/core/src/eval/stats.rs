use rand::distr::Distribution;
use rand_distr::Binomial;

use crate::error::{Error, Result};
use crate::model::{last_success_index, Instance, SampleMatrix};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// No-success counts over `m` sample sequences.
///
/// `counts[i - 1] = T_i`, the number of sequences with no success among
/// trials `i..=n`, for `i` in `1..=n+1` (so `T_{n+1} = m`), and
/// `qhat[i - 1] = T_i / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QHatStatistics<F> {
    m: usize,
    counts: Vec<u64>,
    qhat: Vec<F>,
}

impl<F: Scalar> QHatStatistics<F> {
    /// Validates `0 <= T_1 <= .. <= T_{n+1} = m`.
    pub fn from_counts(m: usize, counts: Vec<u64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidCounts("m must be positive".into()));
        }
        if counts.len() < 2 {
            return Err(Error::InvalidCounts("need T_1..T_{n+1} with n >= 1".into()));
        }
        if counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidCounts(
                "T_i must be non-decreasing in i".into(),
            ));
        }
        if counts.last() != Some(&(m as u64)) {
            return Err(Error::InvalidCounts(format!("T_(n+1) must equal m = {m}")));
        }
        let denom = F::from_count(m);
        let qhat = counts
            .iter()
            .map(|&t| F::from_count(t as usize) / denom)
            .collect();
        Ok(Self { m, counts, qhat })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn qhat(&self) -> &[F] {
        &self.qhat
    }

    /// `Q_hat_i` for `i` in `1..=n+1`.
    pub fn q_hat(&self, i: usize) -> F {
        self.qhat[i - 1]
    }
}

/// Counts from a sample matrix via per-row last-success indices:
/// `T_i = #{j : last_success(row j) <= i - 1}`.
pub fn qhat_statistics<F: Scalar>(samples: &SampleMatrix) -> QHatStatistics<F> {
    let n = samples.n();
    let mut hist = vec![0u64; n + 1];
    for row in samples.rows() {
        hist[last_success_index(row)] += 1;
    }
    let counts = hist
        .iter()
        .scan(0u64, |acc, &h| {
            *acc += h;
            Some(*acc)
        })
        .collect();
    QHatStatistics::from_counts(samples.m(), counts).expect("cumulative histogram is valid")
}

/// Draws the counts `T_1..T_{n+1}` for `m` fresh sample sequences without
/// materializing them: `T_{n+1} = m` and, going right to left,
/// `T_i ~ Binomial(T_{i+1}, 1 - p_i)`.
pub fn draw_qhat_statistics<F: Scalar>(
    instance: &Instance<F>,
    m: usize,
    rng: &mut Rng,
) -> QHatStatistics<F> {
    let n = instance.n();
    let mut counts = vec![0u64; n + 1];
    counts[n] = m as u64;
    for i in (0..n).rev() {
        let keep = 1.0 - instance.probs()[i].as_f64();
        let above = counts[i + 1];
        counts[i] = if above == 0 || keep <= 0.0 {
            0
        } else if keep >= 1.0 {
            above
        } else {
            Binomial::new(above, keep)
                .expect("valid binomial")
                .sample(rng)
        };
    }
    QHatStatistics::from_counts(m, counts).expect("binomial thinning keeps counts monotone")
}
