//! Instances, odds, samples and thresholds.
//!
//! Trial indices exposed through the public API are 1-based: trial `i` has
//! success probability `p_i` for `i` in `1..=n`. Threshold index `n + 1`
//! means the policy never stops and therefore loses.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::scalar::Scalar;

/// Success probabilities `p_1..p_n` of independent Bernoulli trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<F> {
    probs: Vec<F>,
}

/// On-disk layout of an instance: `{"n": <int>, "p": [<float>...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    p: Vec<f64>,
}

impl<F: Scalar> Instance<F> {
    pub fn new(probs: Vec<F>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (index, &p) in probs.iter().enumerate() {
            // NaN fails both comparisons.
            if !(p >= F::zero() && p <= F::one()) {
                return Err(Error::InvalidProbability {
                    index: index + 1,
                    value: p.as_f64(),
                });
            }
        }
        Ok(Self { probs })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    /// Probabilities in trial order (`probs()[i - 1] == p_i`).
    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    /// `p_i` for a 1-based trial index.
    pub fn p(&self, i: usize) -> F {
        self.probs[i - 1]
    }

    pub fn odds_summary(&self) -> OddsSummary<F> {
        odds_summary(self)
    }

    /// Converts to another scalar type.
    pub fn cast<G: Scalar>(&self) -> Instance<G> {
        Instance {
            probs: self.probs.iter().map(|&p| G::lit(p.as_f64())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            n: self.n(),
            p: self.probs.iter().map(|p| p.as_f64()).collect(),
        };
        serde_json::to_string(&file).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.n != file.p.len() {
            return Err(Error::LengthMismatch {
                declared: file.n,
                actual: file.p.len(),
            });
        }
        if let Some((index, &value)) = file
            .p
            .iter()
            .enumerate()
            .find(|(_, v)| F::from_f64(**v).is_none_or(|x| x.as_f64() != **v))
        {
            // Only reachable for f32 instances read from f64 data.
            return Err(Error::InvalidParameter(format!(
                "p[{}] = {value} is not representable in the target scalar type",
                index + 1
            )));
        }
        Self::new(file.p.into_iter().map(F::lit).collect())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Odds `r_i`, their sum `R`, and the no-success products `Q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OddsSummary<F> {
    odds: Vec<F>,
    total: F,
    no_success: F,
    suffix_no_success: Vec<F>,
}

impl<F: Scalar> OddsSummary<F> {
    pub fn n(&self) -> usize {
        self.odds.len()
    }

    /// `r_1..r_n`; `+inf` where `p_i = 1`.
    pub fn odds(&self) -> &[F] {
        &self.odds
    }

    /// `R`, infinite iff some `p_i = 1`.
    pub fn total(&self) -> F {
        self.total
    }

    /// `Q = prod (1 - p_i)`, computed left to right.
    pub fn no_success(&self) -> F {
        self.no_success
    }

    /// `Q_1..Q_{n+1}` with `Q_{n+1} = 1`.
    pub fn suffix_no_success(&self) -> &[F] {
        &self.suffix_no_success
    }

    /// `Q_i` for `i` in `1..=n+1`.
    pub fn q(&self, i: usize) -> F {
        self.suffix_no_success[i - 1]
    }
}

/// Odds of a single success probability, `+inf` at `p = 1`.
pub fn odds_of<F: Scalar>(p: F) -> F {
    if p >= F::one() {
        F::infinity()
    } else {
        p / (F::one() - p)
    }
}

/// Computes odds and no-success products in single linear passes.
///
/// Products are plain double (or single) precision with no log-space
/// rescaling; relative error grows like `n * eps`, which is well below
/// `1e-12` for `n <= 1e3` in `f64`.
pub fn odds_summary<F: Scalar>(instance: &Instance<F>) -> OddsSummary<F> {
    let odds: Vec<F> = instance.probs.iter().map(|&p| odds_of(p)).collect();
    // inf + x = inf, so the sum is infinite iff some r_i is.
    let total = odds.iter().fold(F::zero(), |acc, &r| acc + r);
    let no_success = instance
        .probs
        .iter()
        .fold(F::one(), |acc, &p| acc * (F::one() - p));
    let n = instance.n();
    let mut suffix = vec![F::one(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * (F::one() - instance.probs[i]);
    }
    OddsSummary {
        odds,
        total,
        no_success,
        suffix_no_success: suffix,
    }
}

/// Index (1-based) of the last `true` entry, or 0 if there is none.
pub fn last_success_index(row: &[bool]) -> usize {
    row.iter().rposition(|&y| y).map_or(0, |i| i + 1)
}

/// Last and second-last success indices (1-based, 0 when absent).
pub fn last_two_success_indices(row: &[bool]) -> (usize, usize) {
    let mut hits = row
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &y)| y)
        .map(|(i, _)| i + 1);
    let last = hits.next().unwrap_or(0);
    let second = hits.next().unwrap_or(0);
    (last, second)
}

/// `m` sample sequences of length `n`, stored row-major: row `j` is the
/// `j`-th sample sequence `(Y_{1,j}, .., Y_{n,j})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleMatrix {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl SampleMatrix {
    pub fn new(m: usize, n: usize, bits: Vec<bool>) -> Result<Self> {
        if m == 0 || n == 0 || bits.len() != m * n {
            return Err(Error::SampleShape {
                m,
                n,
                actual: bits.len(),
            });
        }
        Ok(Self { m, n, bits })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(
                "sample rows differ in length".into(),
            ));
        }
        Self::new(rows.len(), n, rows.concat())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample sequence `j` (0-based).
    pub fn row(&self, j: usize) -> &[bool] {
        &self.bits[j * self.n..(j + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.bits.chunks_exact(self.n)
    }

    /// Binary dump: `m` and `n` as little-endian `u64`, then the `m * n` bits
    /// row-major, packed least-significant bit first, last byte zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.bits.len().div_ceil(8));
        out.extend_from_slice(&(self.m as u64).to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        for chunk in self.bits.chunks(8) {
            let byte = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | (u8::from(b) << k));
            out.push(byte);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header_err =
            || Error::InvalidParameter("sample dump shorter than its 16-byte header".into());
        let m = u64::from_le_bytes(bytes.get(0..8).ok_or_else(header_err)?.try_into().unwrap());
        let n = u64::from_le_bytes(bytes.get(8..16).ok_or_else(header_err)?.try_into().unwrap());
        let (m, n) = (usize::try_from(m), usize::try_from(n));
        let (Ok(m), Ok(n)) = (m, n) else {
            return Err(Error::InvalidParameter(
                "sample dump dimensions overflow usize".into(),
            ));
        };
        let total = m
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidParameter("sample dump too large".into()))?;
        let payload = &bytes[16..];
        if payload.len() != total.div_ceil(8) {
            return Err(Error::SampleShape {
                m,
                n,
                actual: payload.len() * 8,
            });
        }
        let bits = (0..total)
            .map(|k| payload[k / 8] >> (k % 8) & 1 == 1)
            .collect();
        Self::new(m, n, bits)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }
}

/// One realized trial sequence `X_1..X_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    values: Vec<bool>,
}

impl Realization {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn last_success(&self) -> usize {
        last_success_index(&self.values)
    }
}

/// Draws an `m x n` sample matrix. Identical `(instance, m, seed)` give
/// bit-identical output.
pub fn draw_samples<F: Scalar>(
    instance: &Instance<F>,
    m: usize,
    seed: u64,
) -> Result<SampleMatrix> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let probs: Vec<f64> = instance.probs.iter().map(|p| p.as_f64()).collect();
    let bits = (0..m)
        .flat_map(|_| {
            probs
                .iter()
                .map(|&p| rng.random::<f64>() < p)
                .collect::<Vec<_>>()
        })
        .collect();
    SampleMatrix::new(m, instance.n(), bits)
}

/// Draws one realization of the trials; same stream as a single sample row.
pub fn draw_realization<F: Scalar>(instance: &Instance<F>, seed: u64) -> Realization {
    let samples = draw_samples(instance, 1, seed).expect("m = 1 is valid");
    Realization::new(samples.bits)
}

/// A threshold `tau` in `1..=n+1`. The policy stops at the first success
/// observed at or after trial `tau`; `tau = n + 1` never stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThresholdIndex(usize);

impl ThresholdIndex {
    pub fn new(value: usize, n: usize) -> Result<Self> {
        if value == 0 || value > n + 1 {
            return Err(Error::ThresholdOutOfRange { value, max: n + 1 });
        }
        Ok(Self(value))
    }

    pub const FIRST: Self = Self(1);

    pub fn never(n: usize) -> Self {
        Self(n + 1)
    }

    /// Constructor for callers that already know `1 <= value <= n + 1`.
    pub(crate) fn from_raw(value: usize) -> Self {
        debug_assert!(value >= 1);
        Self(value)
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn is_never(self, n: usize) -> bool {
        self.0 == n + 1
    }
}

/// Probability mass over thresholds `1..=n+1`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdDistribution<F> {
    masses: Vec<F>,
}

/// Slack allowed on the total mass of a distribution over `n + 1` points.
pub fn mass_tolerance<F: Scalar>(n: usize) -> F {
    F::lit(1e-12).max(F::epsilon() * F::from_count(4 * (n + 1)))
}

impl<F: Scalar> ThresholdDistribution<F> {
    /// `masses[k]` is `P(tau = k + 1)`; the vector has length `n + 1`.
    pub fn from_masses(masses: Vec<F>) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::DistributionLength {
                expected: 2,
                actual: masses.len(),
            });
        }
        for (k, &v) in masses.iter().enumerate() {
            if !(v >= F::zero() && v.is_finite()) {
                return Err(Error::DistributionEntry {
                    index: k + 1,
                    value: v.as_f64(),
                });
            }
        }
        let dist = Self { masses };
        let total = dist.total_mass();
        if (total - F::one()).abs() > mass_tolerance(dist.n()) {
            return Err(Error::DistributionMass {
                total: total.as_f64(),
            });
        }
        Ok(dist)
    }

    pub fn point(tau: ThresholdIndex, n: usize) -> Self {
        let mut masses = vec![F::zero(); n + 1];
        masses[tau.get() - 1] = F::one();
        Self { masses }
    }

    /// Number of trials of the instance this distribution belongs to.
    pub fn n(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn mass(&self, tau: ThresholdIndex) -> F {
        self.masses
            .get(tau.get() - 1)
            .copied()
            .unwrap_or_else(F::zero)
    }

    pub fn masses(&self) -> &[F] {
        &self.masses
    }

    pub fn total_mass(&self) -> F {
        crate::scalar::pairwise_sum(&self.masses)
    }

    /// Thresholds with positive mass, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = (ThresholdIndex, F)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > F::zero())
            .map(|(k, &v)| (ThresholdIndex(k + 1), v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(p: &[f64]) -> Instance<f64> {
        Instance::new(p.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(matches!(
            Instance::<f64>::new(vec![]),
            Err(Error::EmptyInstance)
        ));
        assert!(matches!(
            Instance::new(vec![0.5, 1.5]),
            Err(Error::InvalidProbability { index: 2, .. })
        ));
        assert!(Instance::new(vec![f64::NAN]).is_err());
        assert!(Instance::new(vec![-0.0, 1.0]).is_ok());
    }

    #[test]
    fn odds_of_zero_instance() {
        let s = inst(&[0.0, 0.0]).odds_summary();
        assert_eq!(s.odds(), &[0.0, 0.0]);
        assert_eq!(s.total(), 0.0);
        assert_eq!(s.no_success(), 1.0);
        assert_eq!(s.suffix_no_success(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn certain_success_gives_infinite_odds() {
        let s = inst(&[1.0, 0.5]).odds_summary();
        assert!(s.odds()[0].is_infinite());
        assert_eq!(s.odds()[1], 1.0);
        assert!(s.total().is_infinite());
        assert_eq!(s.no_success(), 0.0);
    }

    #[test]
    fn half_half_sandwich() {
        let s = inst(&[0.5, 0.5]).odds_summary();
        assert_eq!(s.total(), 2.0);
        assert_eq!(s.no_success(), 0.25);
        assert!((-2.0f64).exp() <= 0.25 && 0.25 <= 1.0 / 3.0);
        assert_eq!(s.q(2), 0.5);
        assert_eq!(s.q(3), 1.0);
    }

    #[test]
    fn last_success() {
        assert_eq!(last_success_index(&[true, false, true, false]), 3);
        assert_eq!(last_success_index(&[false, false]), 0);
        assert_eq!(last_success_index(&[false, true]), 2);
        assert_eq!(
            last_two_success_indices(&[true, false, true, false]),
            (3, 1)
        );
        assert_eq!(last_two_success_indices(&[false, true]), (2, 0));
    }

    #[test]
    fn degenerate_samples() {
        let ones = draw_samples(&inst(&[1.0, 1.0]), 3, 11).unwrap();
        assert!(ones.rows().all(|r| r == [true, true]));
        let zeros = draw_samples(&inst(&[0.0, 0.0]), 3, 11).unwrap();
        assert!(zeros.rows().all(|r| r == [false, false]));
        assert!(draw_samples(&inst(&[0.5]), 0, 1).is_err());
    }

    #[test]
    fn samples_are_deterministic() {
        let i = inst(&[0.3, 0.6, 0.1]);
        assert_eq!(
            draw_samples(&i, 50, 99).unwrap(),
            draw_samples(&i, 50, 99).unwrap()
        );
        assert_ne!(
            draw_samples(&i, 50, 99).unwrap(),
            draw_samples(&i, 50, 100).unwrap()
        );
    }

    #[test]
    fn f32_instance_draws_like_f64() {
        let a = inst(&[0.25, 0.5, 0.75]);
        assert_eq!(
            draw_samples(&a, 20, 5).unwrap(),
            draw_samples(&a.cast::<f32>(), 20, 5).unwrap()
        );
    }

    #[test]
    fn realization_degenerate() {
        assert_eq!(
            draw_realization(&inst(&[1.0, 0.0]), 3).values(),
            &[true, false]
        );
        assert!(draw_realization(&inst(&[0.0; 6]), 3)
            .values()
            .iter()
            .all(|&x| !x));
    }

    #[test]
    fn realization_means_within_four_sigma() {
        let p = [0.1, 0.5, 0.9];
        let i = inst(&p);
        let draws = 100_000;
        let mut hits = [0usize; 3];
        for seed in 0..draws {
            for (h, &x) in hits
                .iter_mut()
                .zip(draw_realization(&i, seed as u64).values())
            {
                *h += usize::from(x);
            }
        }
        for (h, p) in hits.iter().zip(p) {
            let sigma = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((*h as f64 / draws as f64 - p).abs() <= 4.0 * sigma);
        }
    }

    #[test]
    fn column_mean_converges() {
        let s = draw_samples(&inst(&[0.3]), 100_000, 2024).unwrap();
        let mean = s.rows().filter(|r| r[0]).count() as f64 / 1e5;
        assert!((mean - 0.3).abs() <= 0.006, "{mean}");
    }

    #[test]
    fn json_layout() {
        let i = inst(&[1.0, 0.5, 1.0 / 3.0]);
        let text = i.to_json();
        assert_eq!(text, r#"{"n":3,"p":[1.0,0.5,0.3333333333333333]}"#);
        assert_eq!(Instance::<f64>::from_json(&text).unwrap(), i);
        assert!(matches!(
            Instance::<f64>::from_json(r#"{"n":2,"p":[0.5]}"#),
            Err(Error::LengthMismatch {
                declared: 2,
                actual: 1
            })
        ));
        assert!(Instance::<f64>::from_json(r#"{"n":1,"p":[0.5],"x":1}"#).is_err());
        assert!(Instance::<f32>::from_json(r#"{"n":1,"p":[0.1]}"#).is_err());
    }

    #[test]
    fn sample_dump_layout() {
        let s = SampleMatrix::from_rows(&[
            vec![true, false, true],
            vec![false, true, true],
            vec![true, true, true],
        ])
        .unwrap();
        let bytes = s.to_bytes();
        assert_eq!(&bytes[..8], &3u64.to_le_bytes());
        assert_eq!(&bytes[8..16], &3u64.to_le_bytes());
        // bits 1,0,1,0,1,1,1,1 | 1
        assert_eq!(&bytes[16..], &[0b1111_0101, 0b0000_0001]);
        assert_eq!(SampleMatrix::from_bytes(&bytes).unwrap(), s);
        assert!(SampleMatrix::from_bytes(&bytes[..17]).is_err());
        assert!(SampleMatrix::from_bytes(&bytes[..5]).is_err());
    }

    #[test]
    fn threshold_index_range() {
        assert!(ThresholdIndex::new(0, 3).is_err());
        assert!(ThresholdIndex::new(5, 3).is_err());
        assert!(ThresholdIndex::new(4, 3).unwrap().is_never(3));
        assert_eq!(ThresholdIndex::never(3).get(), 4);
    }

    #[test]
    fn distribution_validation() {
        assert!(ThresholdDistribution::from_masses(vec![0.5, 0.5]).is_ok());
        assert!(ThresholdDistribution::from_masses(vec![0.5, 0.4]).is_err());
        assert!(ThresholdDistribution::from_masses(vec![1.5, -0.5]).is_err());
        assert!(ThresholdDistribution::<f64>::from_masses(vec![1.0]).is_err());
        let d = ThresholdDistribution::<f64>::point(ThresholdIndex::new(2, 3).unwrap(), 3);
        assert_eq!(
            d.support().collect::<Vec<_>>(),
            vec![(ThresholdIndex::new(2, 3).unwrap(), 1.0)]
        );
        assert_eq!(d.mass(ThresholdIndex::FIRST), 0.0);
    }
}
