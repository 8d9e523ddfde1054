//! Monte Carlo adversarial loss.

use rayon::prelude::*;

use super::{ExcessEstimate, Metadata};
use crate::adversaries::{Adversary, AttackBudget};
use crate::budget::Budget;
use crate::domain::{bayes_loss, draw_example, draw_sample, hamming_count, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::rng::RandomSource;
use crate::stats::{bounded_ci, mean_and_se};

/// Per trial: draw `S ∼ D^n` and `(x, y) ∼ D`, let the adversary poison `S`,
/// and score the learner's error probability at `(x, y)`.
///
/// Any attack beyond `⌊η·n⌋` rewrites aborts the whole estimate.
pub fn mc_adversarial_loss(
    learner: &dyn Learner,
    adversary: &dyn Adversary,
    dist: &ProductBiasDistribution,
    n: usize,
    eta: Budget,
    trials: usize,
    source: &RandomSource,
) -> Result<ExcessEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    if learner.domain_size() != dist.dim() {
        return Err(Error::DimensionMismatch { expected: dist.dim(), actual: learner.domain_size() });
    }
    let budget = AttackBudget::new(eta, n);
    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let src = source.child(t as u64);
            let sample = draw_sample(dist, n, &src.named("sample"))?;
            let target = draw_example(dist, &mut src.named("test").rng());
            let inner = src.named("learner");
            let poisoned = adversary.attack(learner, &sample, target, &budget, &inner)?;
            let changed = hamming_count(&sample, &poisoned)?;
            if changed > budget.max_corruptions() {
                return Err(Error::BudgetViolation {
                    adversary: adversary.id(),
                    changed,
                    allowed: budget.max_corruptions(),
                });
            }
            learner.error_probability(&poisoned, target, &inner)
        })
        .collect::<Result<_>>()?;
    let (mean, se) = mean_and_se(&errors);
    let (lo, hi) = bounded_ci(mean, se, trials);
    let bayes = bayes_loss(dist);
    let metadata = Metadata {
        experiment: "adversarial".into(),
        learner: learner.id(),
        adversary: adversary.id(),
        d: dist.dim(),
        eta,
        n,
        bias: dist.bias().coords().to_vec(),
    };
    ExcessEstimate::new(mean - bayes, (lo - bayes, hi - bayes), trials, source.seed(), bayes, metadata)
}
