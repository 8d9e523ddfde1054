//! Subsample-cover learner for classes of bounded VC dimension.
//!
//! The sample is split in halves. A uniform `k`-subset of the first half
//! picks the restriction class `H_T`; the coupled exponential mechanism over
//! `H_T` then runs on the second half.

use rand::seq::index;

use super::exp_mech::{coupled_predict, predict_prob_from_counts, ExpMechanismConfig};
use super::Learner;
use crate::analysis::restrict_dedupe;
use crate::budget::Budget;
use crate::domain::{HypothesisClass, Label, LabelCounts, Point, Sample};
use crate::error::{Error, Result};
use crate::rng::{threshold, RandomSource};

/// Above this many `k`-subsets, [`VcLearner::exact_plus`] reports `None`.
const EXACT_SUBSET_LIMIT: u128 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VcLearnerConfig {
    eta: Budget,
    d: usize,
    k: usize,
}

impl VcLearnerConfig {
    /// Requires `η < 1/(4d)`, which also guarantees `k ≥ 1`.
    pub fn new(eta: Budget, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("VC parameter d must be at least 1".into()));
        }
        if !eta.below_reciprocal(4 * d as u64) {
            return Err(Error::Precondition(format!("eta = {eta} must be below 1/(4d) = 1/{}", 4 * d)));
        }
        // k = ⌊√(d / 4η)⌋: the largest k with 4·num·k² ≤ d·den.
        let (num, den) = (u128::from(eta.numer()), u128::from(eta.denom()));
        let target = d as u128 * den;
        let mut k = ((target as f64 / (4.0 * num as f64)).sqrt()) as u128;
        while 4 * num * (k + 1) * (k + 1) <= target {
            k += 1;
        }
        while k > 0 && 4 * num * k * k > target {
            k -= 1;
        }
        if k == 0 {
            return Err(Error::Precondition("subset size k = 0".into()));
        }
        Ok(Self { eta, d, k: k as usize })
    }

    pub fn eta(&self) -> Budget {
        self.eta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `(⌊n/2⌋, ⌈n/2⌉)`.
    pub fn split(&self, n: usize) -> (usize, usize) {
        (n / 2, n - n / 2)
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        if (n as u128) * u128::from(self.eta.numer()) < u128::from(self.eta.denom()) {
            return Err(Error::Precondition(format!(
                "sample size {n} is below 1/eta = {}/{}",
                self.eta.denom(),
                self.eta.numer()
            )));
        }
        let (n1, _) = self.split(n);
        if self.k > n1 {
            return Err(Error::Precondition(format!("subset size k = {} exceeds first half n1 = {n1}", self.k)));
        }
        Ok(())
    }

    fn exp_config(&self) -> ExpMechanismConfig {
        ExpMechanismConfig::from_budget(self.eta)
    }
}

fn draw_subset(n1: usize, k: usize, source: &RandomSource) -> Vec<usize> {
    let mut j = index::sample(&mut source.named("subset").rng(), n1, k).into_vec();
    j.sort_unstable();
    j
}

fn restricted_class(class: &HypothesisClass, first: &Sample, subset: &[usize]) -> Result<HypothesisClass> {
    let points: Vec<Point> = subset.iter().map(|&i| first.get(i).point).collect();
    Ok(restrict_dedupe(class, &points)?.into_class())
}

/// One prediction of the subsample-cover learner. The subset `J` and the
/// threshold `r` come from independent child streams of `source`.
pub fn vc_learner_predict(
    class: &HypothesisClass,
    sample: &Sample,
    x: Point,
    cfg: &VcLearnerConfig,
    source: &RandomSource,
) -> Result<Label> {
    class.check_point(x)?;
    cfg.check_size(sample.len())?;
    let (n1, _) = cfg.split(sample.len());
    let (first, second) = sample.split_at(n1)?;
    let subset = draw_subset(n1, cfg.k, source);
    let restricted = restricted_class(class, &first, &subset)?;
    let r = threshold(&source.named("threshold"));
    coupled_predict(&restricted, &second, x, &cfg.exp_config(), r)
}

#[derive(Debug, Clone)]
pub struct VcLearner {
    class: HypothesisClass,
    cfg: VcLearnerConfig,
}

impl VcLearner {
    pub fn new(class: HypothesisClass, cfg: VcLearnerConfig) -> Self {
        Self { class, cfg }
    }

    pub fn config(&self) -> &VcLearnerConfig {
        &self.cfg
    }

    /// Exact `p_plus` over the threshold, conditional on the subset `J`.
    pub fn plus_given_subset(&self, sample: &Sample, x: Point, subset: &[usize]) -> Result<f64> {
        let (n1, _) = self.cfg.split(sample.len());
        let (first, second) = sample.split_at(n1)?;
        let restricted = restricted_class(&self.class, &first, subset)?;
        let counts = LabelCounts::new(&second, restricted.domain_size())?;
        Ok(predict_prob_from_counts(&restricted, &counts, x, &self.cfg.exp_config()).p_plus)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl Learner for VcLearner {
    fn id(&self) -> String {
        "vc".into()
    }

    fn domain_size(&self) -> usize {
        self.class.domain_size()
    }

    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label> {
        vc_learner_predict(&self.class, sample, x, &self.cfg, source)
    }

    /// Averages over every `k`-subset when there are at most 20 000 of them.
    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>> {
        self.class.check_point(x)?;
        self.cfg.check_size(sample.len())?;
        let (n1, _) = self.cfg.split(sample.len());
        let total = binomial(n1, self.cfg.k);
        if total > EXACT_SUBSET_LIMIT {
            return Ok(None);
        }
        let mut acc = 0.0;
        for_each_subset(n1, self.cfg.k, &mut |j| {
            acc += self.plus_given_subset(sample, x, j)?;
            Ok(())
        })?;
        Ok(Some(acc / total as f64))
    }

    /// Draws `J` from the same stream as `predict` and integrates the threshold out.
    fn plus_probability(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<f64> {
        self.class.check_point(x)?;
        self.cfg.check_size(sample.len())?;
        let (n1, _) = self.cfg.split(sample.len());
        let subset = draw_subset(n1, self.cfg.k, source);
        self.plus_given_subset(sample, x, &subset)
    }
}
