//! Learning rules.
//!
//! Every learner answers two questions about a training sample `S` and a
//! query point `x`: a single randomized prediction, and the probability that
//! the prediction is `+1`. Experiments score learners through the
//! probability (see [`Learner::plus_probability`]) and only fall back to
//! sampled predictions for black-box rules.

mod exp_mech;
mod majority;
mod public;
mod vc;

pub use exp_mech::{
    coupled_predict, exp_log_weights, exp_mechanism_dist, exp_mechanism_sample,
    exp_mechanism_sample_index, exp_weights, predict_prob, CoupledLearner, ExpMechanismConfig,
    ExpMechanismLearner, PredictionDistribution,
};
pub use majority::{majority_plus_probability, majority_subsample_predict, MajorityLearner};
pub use public::{
    public_transform, ExactOracle, MonteCarloOracle, OracleValue, PlusOracle, PublicLearner,
    PublicPrediction, DEFAULT_INNER_DRAWS,
};
pub use vc::{vc_learner_predict, VcLearner, VcLearnerConfig};

use rand::Rng;

use crate::domain::{BiasVector, Example, Label, Point, Sample};
use crate::error::Result;
use crate::rng::RandomSource;

pub trait Learner: Send + Sync {
    /// Short identifier used in reports.
    fn id(&self) -> String;

    fn domain_size(&self) -> usize;

    /// One prediction at `x`, with internal randomness drawn from `source`.
    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label>;

    /// `Pr_r[A_r(S)(x) = +1]` when it can be computed exactly.
    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>>;

    /// Unbiased estimate of `Pr_r[A_r(S)(x) = +1]`.
    ///
    /// Implementations integrate out whatever internal randomness they can
    /// and draw the rest from `source`, using the same streams as
    /// [`Learner::predict`].
    fn plus_probability(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<f64> {
        match self.exact_plus(sample, x)? {
            Some(p) => Ok(p),
            None => Ok(if self.predict(sample, x, source)? == Label::Plus { 1.0 } else { 0.0 }),
        }
    }

    /// Probability (or unbiased estimate of it) that the prediction at `target.point` is wrong.
    fn error_probability(&self, sample: &Sample, target: Example, source: &RandomSource) -> Result<f64> {
        let p = self.plus_probability(sample, target.point, source)?;
        Ok(error_from_plus(p, target.label))
    }
}

/// Error probability of a `p_plus` prediction against label `y`: `(1 − y(2p − 1))/2`.
pub fn error_from_plus(p_plus: f64, y: Label) -> f64 {
    match y {
        Label::Plus => 1.0 - p_plus,
        Label::Minus => p_plus,
    }
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn domain_size(&self) -> usize {
        (**self).domain_size()
    }
    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label> {
        (**self).predict(sample, x, source)
    }
    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>> {
        (**self).exact_plus(sample, x)
    }
    fn plus_probability(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<f64> {
        (**self).plus_probability(sample, x, source)
    }
}

/// Ignores the sample and always predicts one label.
#[derive(Debug, Clone)]
pub struct ConstantLearner {
    label: Label,
    domain_size: usize,
}

impl ConstantLearner {
    pub fn new(domain_size: usize, label: Label) -> Self {
        Self { label, domain_size }
    }
}

impl Learner for ConstantLearner {
    fn id(&self) -> String {
        match self.label {
            Label::Plus => "const-plus".into(),
            Label::Minus => "const-minus".into(),
        }
    }
    fn domain_size(&self) -> usize {
        self.domain_size
    }
    fn predict(&self, _: &Sample, _: Point, _: &RandomSource) -> Result<Label> {
        Ok(self.label)
    }
    fn exact_plus(&self, _: &Sample, _: Point) -> Result<Option<f64>> {
        Ok(Some(if self.label == Label::Plus { 1.0 } else { 0.0 }))
    }
}

/// Predicts the Bayes-optimal label for a known bias vector (`+1` when `u_i ≥ 0`).
#[derive(Debug, Clone)]
pub struct BayesLearner {
    bias: BiasVector,
}

impl BayesLearner {
    pub fn new(bias: BiasVector) -> Self {
        Self { bias }
    }
}

impl Learner for BayesLearner {
    fn id(&self) -> String {
        "bayes".into()
    }
    fn domain_size(&self) -> usize {
        self.bias.dim()
    }
    fn predict(&self, _: &Sample, x: Point, _: &RandomSource) -> Result<Label> {
        Ok(Label::from_bool(self.bias.get(x.0) >= 0.0))
    }
    fn exact_plus(&self, _: &Sample, x: Point) -> Result<Option<f64>> {
        Ok(Some(if self.bias.get(x.0) >= 0.0 { 1.0 } else { 0.0 }))
    }
}

/// Flips a fair coin regardless of the sample; no exact path, so scoring uses sampled predictions.
#[derive(Debug, Clone)]
pub struct CoinLearner {
    domain_size: usize,
}

impl CoinLearner {
    pub fn new(domain_size: usize) -> Self {
        Self { domain_size }
    }
}

impl Learner for CoinLearner {
    fn id(&self) -> String {
        "coin".into()
    }
    fn domain_size(&self) -> usize {
        self.domain_size
    }
    fn predict(&self, _: &Sample, _: Point, source: &RandomSource) -> Result<Label> {
        Ok(Label::from_bool(source.named("coin").rng().gen::<bool>()))
    }
    fn exact_plus(&self, _: &Sample, _: Point) -> Result<Option<f64>> {
        Ok(None)
    }
}
