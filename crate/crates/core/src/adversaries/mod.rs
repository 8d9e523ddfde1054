//! Poisoning adversaries.
//!
//! Sample-space attackers rewrite up to `⌊η·n⌋` training examples after
//! seeing the sample and the target. The oblivious machinery instead moves
//! the bias vector `u` of `D_u` through a poisoning scheme.

mod attacks;
mod coupling;
mod scheme;

pub use attacks::{brute_force_attack, greedy_flip_attack};
pub use coupling::maximal_coupling_draw;
pub use scheme::{
    build_scheme_1d, build_scheme_d, lift_scheme, HardBiasDistribution, PoisoningScheme1D,
    PoisoningSchemeD,
};

use crate::budget::Budget;
use crate::domain::{full_alphabet, Example, Point, Sample, DEFAULT_BALL_CAP};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::rng::RandomSource;

/// Corruption allowance `⌊factor·η·n⌋` for samples of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackBudget {
    eta: Budget,
    factor: u64,
    n: usize,
    max_corruptions: usize,
}

impl AttackBudget {
    pub fn new(eta: Budget, n: usize) -> Self {
        Self::with_factor(eta, 1, n)
    }

    /// Radius `factor·η`, which may reach or exceed 1 (then every position may change).
    pub fn with_factor(eta: Budget, factor: u64, n: usize) -> Self {
        let max_corruptions = eta.max_changes(factor, n).min(n);
        Self { eta, factor, n, max_corruptions }
    }

    pub fn eta(&self) -> Budget {
        self.eta
    }

    pub fn factor(&self) -> u64 {
        self.factor
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_corruptions(&self) -> usize {
        self.max_corruptions
    }
}

/// An instance-targeted attacker.
pub trait Adversary: Send + Sync {
    fn id(&self) -> String;

    /// A poisoned sample within the budget. `source` is the learner's
    /// randomness, visible to the adversary.
    fn attack(
        &self,
        learner: &dyn Learner,
        sample: &Sample,
        target: Example,
        budget: &AttackBudget,
        source: &RandomSource,
    ) -> Result<Sample>;
}

/// Leaves the sample untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoAttack;

impl Adversary for NoAttack {
    fn id(&self) -> String {
        "none".into()
    }

    fn attack(&self, _: &dyn Learner, sample: &Sample, _: Example, _: &AttackBudget, _: &RandomSource) -> Result<Sample> {
        Ok(sample.clone())
    }
}

#[derive(Debug, Clone)]
pub struct GreedyAttack {
    alphabet: Vec<Example>,
}

impl GreedyAttack {
    pub fn new(domain_size: usize) -> Self {
        Self { alphabet: full_alphabet(domain_size) }
    }
}

impl Adversary for GreedyAttack {
    fn id(&self) -> String {
        "greedy".into()
    }

    fn attack(&self, _: &dyn Learner, sample: &Sample, target: Example, budget: &AttackBudget, _: &RandomSource) -> Result<Sample> {
        Ok(greedy_flip_attack(sample, target, budget, &self.alphabet))
    }
}

/// Exhaustive maximizer over the ball; tiny instances only.
#[derive(Debug, Clone)]
pub struct BruteForceAttack {
    alphabet: Vec<Example>,
    cap: u128,
}

impl BruteForceAttack {
    pub fn new(domain_size: usize) -> Self {
        Self { alphabet: full_alphabet(domain_size), cap: DEFAULT_BALL_CAP }
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }
}

impl Adversary for BruteForceAttack {
    fn id(&self) -> String {
        "brute".into()
    }

    fn attack(
        &self,
        learner: &dyn Learner,
        sample: &Sample,
        target: Example,
        budget: &AttackBudget,
        source: &RandomSource,
    ) -> Result<Sample> {
        let oracle = |s: &Sample, x: Point| -> Result<f64> {
            match learner.exact_plus(s, x)? {
                Some(p) => Ok(p),
                None => learner.plus_probability(s, x, source),
            }
        };
        brute_force_attack(&oracle, sample, target, budget, &self.alphabet, self.cap)
    }
}

/// Adversary by report id: `none`, `greedy` or `brute`.
pub fn adversary_by_id(id: &str, domain_size: usize) -> Result<Box<dyn Adversary>> {
    match id {
        "none" => Ok(Box::new(NoAttack)),
        "greedy" => Ok(Box::new(GreedyAttack::new(domain_size))),
        "brute" => Ok(Box::new(BruteForceAttack::new(domain_size))),
        other => Err(Error::InvalidValue(format!("unknown adversary `{other}` (expected none, greedy or brute)"))),
    }
}

/// Ids of every shipped adversary.
pub const ADVERSARY_IDS: [&str; 3] = ["none", "greedy", "brute"];
