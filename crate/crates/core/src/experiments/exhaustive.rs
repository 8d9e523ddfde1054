//! Exhaustive evaluation over every sample of a tiny instance.
//!
//! Samples of length `n` over the full alphabet of `d` points are indexed
//! in base `2d` (position `j` is digit `j`). The table stores the exact
//! `p_plus` of every sample at every point, so balls and expectations reduce
//! to index arithmetic.

use crate::domain::{full_alphabet, Example, Point, ProductBiasDistribution, Sample};
use crate::error::{Error, Result};
use crate::learners::{error_from_plus, Learner};

/// Largest number of samples an [`ExhaustiveTable`] will hold.
pub const EXHAUSTIVE_MAX_SAMPLES: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct ExhaustiveTable {
    d: usize,
    n: usize,
    alphabet: Vec<Example>,
    powers: Vec<usize>,
    p_plus: Vec<f64>,
}

impl ExhaustiveTable {
    pub fn new(learner: &dyn Learner, n: usize) -> Result<Self> {
        let d = learner.domain_size();
        let alphabet = full_alphabet(d);
        let a = alphabet.len();
        let mut powers = Vec::with_capacity(n + 1);
        let mut acc: usize = 1;
        for _ in 0..=n {
            powers.push(acc);
            acc = acc.saturating_mul(a);
        }
        let total = powers[n];
        if n == 0 || total > EXHAUSTIVE_MAX_SAMPLES {
            return Err(Error::ScopeExceeded(format!(
                "{a}^{n} samples exceed the exhaustive limit of {EXHAUSTIVE_MAX_SAMPLES}"
            )));
        }
        let mut table = Self { d, n, alphabet, powers, p_plus: Vec::with_capacity(total * d) };
        for idx in 0..total {
            let s = table.sample(idx);
            for x in 0..d {
                let p = learner.exact_plus(&s, Point(x))?.ok_or_else(|| {
                    Error::Precondition(format!("learner {} has no exact prediction probability", learner.id()))
                })?;
                table.p_plus.push(p);
            }
        }
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.powers[self.n]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn digit(&self, idx: usize, pos: usize) -> usize {
        idx / self.powers[pos] % self.alphabet.len()
    }

    pub fn sample(&self, idx: usize) -> Sample {
        Sample::new((0..self.n).map(|j| self.alphabet[self.digit(idx, j)]).collect())
            .expect("n >= 1")
    }

    pub fn index_of(&self, sample: &Sample) -> Result<usize> {
        if sample.len() != self.n {
            return Err(Error::LengthMismatch { left: sample.len(), right: self.n });
        }
        let mut idx = 0;
        for (j, e) in sample.iter().enumerate() {
            let a = self.alphabet.iter().position(|b| b == e).ok_or(Error::DomainMismatch {
                index: e.point.0,
                domain_size: self.d,
            })?;
            idx += a * self.powers[j];
        }
        Ok(idx)
    }

    pub fn p_plus(&self, idx: usize, x: Point) -> f64 {
        self.p_plus[idx * self.d + x.0]
    }

    /// `Pr_{S ∼ D^n}[S = sample(idx)]`.
    pub fn weight(&self, idx: usize, dist: &ProductBiasDistribution) -> f64 {
        (0..self.n).map(|j| dist.prob(self.alphabet[self.digit(idx, j)])).product()
    }

    /// Calls `f` once for every sample within `radius` rewrites of `idx`.
    pub fn for_each_in_ball(&self, idx: usize, radius: usize, f: &mut impl FnMut(usize)) {
        self.ball_rec(0, idx, radius.min(self.n), f);
    }

    fn ball_rec(&self, pos: usize, idx: usize, left: usize, f: &mut impl FnMut(usize)) {
        if pos == self.n || left == 0 {
            f(idx);
            return;
        }
        self.ball_rec(pos + 1, idx, left, f);
        let cur = self.digit(idx, pos);
        for a in 0..self.alphabet.len() {
            if a != cur {
                let moved = idx - cur * self.powers[pos] + a * self.powers[pos];
                self.ball_rec(pos + 1, moved, left - 1, f);
            }
        }
    }

    /// `max_{S' ∈ B(S)} Pr[A(S')(x) ≠ y]`.
    pub fn sup_error(&self, idx: usize, target: Example, radius: usize) -> f64 {
        let mut worst = 0.0f64;
        self.for_each_in_ball(idx, radius, &mut |j| {
            worst = worst.max(error_from_plus(self.p_plus(j, target.point), target.label));
        });
        worst
    }

    /// `E_{S ∼ D^n} E_{z ∼ D} max_{S' ∈ B(S)} Pr[A(S')(x) ≠ y]`.
    pub fn adversarial_loss(&self, dist: &ProductBiasDistribution, radius: usize) -> Result<f64> {
        self.check_dist(dist)?;
        let atoms = dist.atoms();
        let mut total = 0.0;
        for idx in 0..self.len() {
            let w = self.weight(idx, dist);
            if w == 0.0 {
                continue;
            }
            let inner: f64 = atoms.iter().map(|&(z, pz)| pz * self.sup_error(idx, z, radius)).sum();
            total += w * inner;
        }
        Ok(total)
    }

    /// `E_{S ∼ D^n} Pr[A(S)(x) ≠ y]` for a fixed target.
    pub fn clean_error(&self, dist: &ProductBiasDistribution, target: Example) -> Result<f64> {
        self.check_dist(dist)?;
        Ok((0..self.len())
            .map(|idx| self.weight(idx, dist) * error_from_plus(self.p_plus(idx, target.point), target.label))
            .sum())
    }

    fn check_dist(&self, dist: &ProductBiasDistribution) -> Result<()> {
        if dist.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: dist.dim() });
        }
        Ok(())
    }
}

/// Exact adversarial loss against the best attacker within `max_changes` rewrites.
pub fn exact_adversarial_loss(
    learner: &dyn Learner,
    dist: &ProductBiasDistribution,
    n: usize,
    max_changes: usize,
) -> Result<f64> {
    ExhaustiveTable::new(learner, n)?.adversarial_loss(dist, max_changes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ball_enumerate, BiasVector, HypothesisClass, Label, DEFAULT_BALL_CAP};
    use crate::learners::{ExpMechanismConfig, ExpMechanismLearner};

    fn learner(d: usize) -> ExpMechanismLearner {
        ExpMechanismLearner::new(HypothesisClass::full(d).unwrap(), ExpMechanismConfig::new(0.25).unwrap())
    }

    #[test]
    fn index_round_trip_and_ball_matches_enumeration() {
        let t = ExhaustiveTable::new(&learner(2), 3).unwrap();
        assert_eq!(t.len(), 64);
        for idx in [0, 17, 63] {
            let s = t.sample(idx);
            assert_eq!(t.index_of(&s).unwrap(), idx);
            for r in 0..=3 {
                let mut got = Vec::new();
                t.for_each_in_ball(idx, r, &mut |j| got.push(j));
                let expect: Vec<usize> = ball_enumerate(&s, r, &full_alphabet(2), DEFAULT_BALL_CAP)
                    .unwrap()
                    .iter()
                    .map(|b| t.index_of(b).unwrap())
                    .collect();
                let (mut a, mut b) = (got.clone(), expect);
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn weights_sum_to_one_and_radius_is_monotone() {
        let l = learner(1);
        let t = ExhaustiveTable::new(&l, 5).unwrap();
        let dist = ProductBiasDistribution::new(BiasVector::new(vec![0.3]).unwrap());
        let total: f64 = (0..t.len()).map(|i| t.weight(i, &dist)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for r in 0..=5 {
            let v = t.adversarial_loss(&dist, r).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        // Radius n: the adversary picks any sample, so every target is lost as far as possible.
        let worst_plus = (0..t.len()).map(|i| 1.0 - t.p_plus(i, Point(0))).fold(0.0, f64::max);
        let worst_minus = (0..t.len()).map(|i| t.p_plus(i, Point(0))).fold(0.0, f64::max);
        assert!((prev - (0.8 * worst_plus + 0.2 * worst_minus)).abs() < 1e-12);
        let clean = t.clean_error(&dist, Example::new(0, Label::Plus)).unwrap();
        assert!((0.0..=1.0).contains(&clean));
    }
}
