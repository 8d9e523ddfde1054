//! Monte Carlo and exhaustive experiments.
//!
//! Every experiment takes an explicit [`RandomSource`]. Trials fan out over
//! child streams, results are collected in trial order and reduced with
//! [`pairwise_sum`](crate::stats::pairwise_sum), so outputs do not depend on
//! the thread count.

mod adversarial;
mod equivalence;
mod exhaustive;
mod lower;
mod sweep;
mod upper;

pub use adversarial::mc_adversarial_loss;
pub use equivalence::{
    equivalence_check, public_domination_check, EquivalenceReport, PublicDominationReport,
};
pub use exhaustive::{exact_adversarial_loss, ExhaustiveTable, EXHAUSTIVE_MAX_SAMPLES};
pub use lower::{
    learning_curve_experiment, lower_bound_experiment, CurvePoint, CurveReport, LowerBoundReport,
};
pub use sweep::{
    run_cell, run_sweep, BoundCheck, CellOutcome, CellResult, ExperimentKind, SizeRule, SweepCell,
    SweepGrid,
};
pub use upper::{clean_upper_bound, default_upper_grid, upper_bound, upper_bound_experiment, UpperBoundReport};

use crate::budget::Budget;
use crate::domain::{BiasVector, HypothesisClass, Label};
use crate::error::{Error, Result};
use crate::learners::{
    BayesLearner, CoinLearner, ConstantLearner, CoupledLearner, ExpMechanismConfig,
    ExpMechanismLearner, Learner, MajorityLearner, PublicLearner, VcLearner, VcLearnerConfig,
};

/// Default trial count per cell.
pub const DEFAULT_TRIALS: usize = 10_000;

/// Parameters that identify an estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub experiment: String,
    pub learner: String,
    pub adversary: String,
    pub d: usize,
    pub eta: Budget,
    pub n: usize,
    pub bias: Vec<f64>,
}

/// A Monte Carlo excess estimate. `mean`, `ci_low` and `ci_high` refer to
/// the excess, that is the loss minus `bayes_loss`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub seed: u64,
    pub bayes_loss: f64,
    pub metadata: Metadata,
}

impl ExcessEstimate {
    pub fn new(
        mean: f64,
        ci: (f64, f64),
        trials: usize,
        seed: u64,
        bayes_loss: f64,
        metadata: Metadata,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Precondition("an estimate needs at least one trial".into()));
        }
        if !(ci.0 <= mean && mean <= ci.1) {
            return Err(Error::InvalidValue(format!("interval [{}, {}] does not contain {mean}", ci.0, ci.1)));
        }
        Ok(Self { mean, ci_low: ci.0, ci_high: ci.1, trials, seed, bayes_loss, metadata })
    }

    /// Mean adversarial loss, `mean + bayes_loss`.
    pub fn loss_mean(&self) -> f64 {
        self.mean + self.bayes_loss
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Learner ids understood by [`learner_by_id`]; `public(<id>)` wraps any of them.
pub const LEARNER_IDS: [&str; 8] =
    ["exp", "coupled", "vc", "majority", "bayes", "const-plus", "const-minus", "coin"];

/// Builds a learner over the full class on `d` points.
///
/// `majority` uses subsamples of size `⌈1/η⌉`; `bayes` predicts `sign(u_i)`.
pub fn learner_by_id(id: &str, d: usize, eta: Budget, bias: &BiasVector) -> Result<Box<dyn Learner>> {
    if let Some(inner) = id.strip_prefix("public(").and_then(|s| s.strip_suffix(')')) {
        return Ok(Box::new(PublicLearner::new(learner_by_id(inner, d, eta, bias)?)));
    }
    let full = || HypothesisClass::full(d);
    Ok(match id {
        "exp" => Box::new(ExpMechanismLearner::new(full()?, ExpMechanismConfig::from_budget(eta))),
        "coupled" => Box::new(CoupledLearner::new(full()?, ExpMechanismConfig::from_budget(eta))),
        "vc" => Box::new(VcLearner::new(full()?, VcLearnerConfig::new(eta, d)?)),
        "majority" => {
            let k = eta.denom().div_ceil(eta.numer()) as usize;
            Box::new(MajorityLearner::new(d, k)?)
        }
        "bayes" => {
            if bias.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: bias.dim() });
            }
            Box::new(BayesLearner::new(bias.clone()))
        }
        "const-plus" => Box::new(ConstantLearner::new(d, Label::Plus)),
        "const-minus" => Box::new(ConstantLearner::new(d, Label::Minus)),
        "coin" => Box::new(CoinLearner::new(d)),
        other => {
            return Err(Error::InvalidValue(format!(
                "unknown learner `{other}` (expected one of {}, or public(<id>))",
                LEARNER_IDS.join(", ")
            )))
        }
    })
}

/// Base seed used when none is given.
pub const DEFAULT_SEED: u64 = 1729;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_every_id() {
        let eta = Budget::new(1, 64).unwrap();
        let u = BiasVector::uniform(2, 0.1).unwrap();
        for id in LEARNER_IDS {
            let l = learner_by_id(id, 2, eta, &u).unwrap();
            assert_eq!(l.id(), id);
            assert_eq!(l.domain_size(), 2);
        }
        assert_eq!(learner_by_id("public(exp)", 2, eta, &u).unwrap().id(), "public(exp)");
        assert!(learner_by_id("nope", 2, eta, &u).is_err());
        assert!(learner_by_id("vc", 2, Budget::new(1, 4).unwrap(), &u).is_err());
    }

    #[test]
    fn estimate_rejects_bad_interval() {
        let meta = Metadata {
            experiment: "x".into(),
            learner: "l".into(),
            adversary: "a".into(),
            d: 1,
            eta: Budget::new(1, 2).unwrap(),
            n: 1,
            bias: vec![0.0],
        };
        assert!(ExcessEstimate::new(0.5, (0.6, 0.7), 1, 0, 0.0, meta.clone()).is_err());
        assert!(ExcessEstimate::new(0.5, (0.4, 0.7), 0, 0, 0.0, meta.clone()).is_err());
        let e = ExcessEstimate::new(0.5, (0.4, 0.7), 3, 0, 0.25, meta).unwrap();
        assert_eq!(e.loss_mean(), 0.75);
    }
}
