//! Exponential-mechanism learner and its coupled-threshold variant.

use rand::Rng;

use super::Learner;
use crate::budget::Budget;
use crate::domain::{HypothesisClass, Hypothesis, Label, LabelCounts, Point, Sample};
use crate::error::{Error, Result};
use crate::rng::{threshold, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpMechanismConfig {
    eta: f64,
    temperature_override: Option<f64>,
}

impl ExpMechanismConfig {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidBudget(format!("eta = {eta} is not in (0,1)")));
        }
        Ok(Self { eta, temperature_override: None })
    }

    pub fn from_budget(eta: Budget) -> Self {
        Self { eta: eta.value(), temperature_override: None }
    }

    pub fn with_temperature(mut self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidValue(format!("temperature {t} must be positive")));
        }
        self.temperature_override = Some(t);
        Ok(self)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `t = √(ln m / η)` unless overridden. Zero for a single hypothesis.
    pub fn temperature(&self, m: usize) -> f64 {
        self.temperature_override
            .unwrap_or_else(|| ((m as f64).ln() / self.eta).sqrt())
    }
}

/// Probability that a learner outputs `+1` at a fixed `(S, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionDistribution {
    pub p_plus: f64,
}

impl PredictionDistribution {
    pub fn new(p_plus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_plus) {
            return Err(Error::InvalidValue(format!("probability {p_plus} outside [0,1]")));
        }
        Ok(Self { p_plus })
    }

    /// Expected ±1 output, `2p − 1`.
    pub fn mean_sign(&self) -> f64 {
        2.0 * self.p_plus - 1.0
    }
}

/// Softmax of `−t·loss`, shifted by the smallest loss.
pub fn exp_weights(losses: &[f64], t: f64) -> Vec<f64> {
    let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = losses.iter().map(|l| (-t * (l - min)).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Natural-log probabilities of the exponential mechanism.
pub fn exp_log_weights(losses: &[f64], t: f64) -> Vec<f64> {
    let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let log_total = losses.iter().map(|l| (-t * (l - min)).exp()).sum::<f64>().ln();
    losses.iter().map(|l| -t * (l - min) - log_total).collect()
}

/// Selection probabilities `e^{−t·L_S(h)} / W` over the class, in class order.
pub fn exp_mechanism_dist(
    class: &HypothesisClass,
    sample: &Sample,
    cfg: &ExpMechanismConfig,
) -> Result<Vec<f64>> {
    let losses = class.losses(sample)?;
    Ok(exp_weights(&losses, cfg.temperature(class.len())))
}

/// Index of a hypothesis drawn from the exponential mechanism.
pub fn exp_mechanism_sample_index(
    class: &HypothesisClass,
    sample: &Sample,
    cfg: &ExpMechanismConfig,
    source: &RandomSource,
) -> Result<usize> {
    let probs = exp_mechanism_dist(class, sample, cfg)?;
    let r: f64 = source.rng().gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return Ok(i);
        }
    }
    Ok(probs.len() - 1)
}

pub fn exp_mechanism_sample<'a>(
    class: &'a HypothesisClass,
    sample: &Sample,
    cfg: &ExpMechanismConfig,
    source: &RandomSource,
) -> Result<&'a Hypothesis> {
    Ok(class.get(exp_mechanism_sample_index(class, sample, cfg, source)?))
}

/// Exact probability that the exponential mechanism labels `x` with `+1`.
pub fn predict_prob(
    class: &HypothesisClass,
    sample: &Sample,
    x: Point,
    cfg: &ExpMechanismConfig,
) -> Result<PredictionDistribution> {
    class.check_point(x)?;
    let counts = LabelCounts::new(sample, class.domain_size())?;
    Ok(predict_prob_from_counts(class, &counts, x, cfg))
}

pub(crate) fn predict_prob_from_counts(
    class: &HypothesisClass,
    counts: &LabelCounts,
    x: Point,
    cfg: &ExpMechanismConfig,
) -> PredictionDistribution {
    let losses: Vec<f64> = class.iter().map(|h| counts.loss(h)).collect();
    let probs = exp_weights(&losses, cfg.temperature(class.len()));
    let p: f64 = class
        .iter()
        .zip(&probs)
        .filter(|(h, _)| h.at(x) == Label::Plus)
        .map(|(_, p)| p)
        .sum();
    PredictionDistribution { p_plus: p.clamp(0.0, 1.0) }
}

/// Threshold rule: `+1` iff `r ≤ p_plus(S, x)`.
pub fn coupled_predict(
    class: &HypothesisClass,
    sample: &Sample,
    x: Point,
    cfg: &ExpMechanismConfig,
    r: f64,
) -> Result<Label> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidValue(format!("threshold {r} outside [0,1]")));
    }
    let p = predict_prob(class, sample, x, cfg)?;
    Ok(Label::from_bool(r <= p.p_plus))
}

/// Samples a hypothesis from the exponential mechanism and evaluates it at `x`.
#[derive(Debug, Clone)]
pub struct ExpMechanismLearner {
    class: HypothesisClass,
    cfg: ExpMechanismConfig,
}

impl ExpMechanismLearner {
    pub fn new(class: HypothesisClass, cfg: ExpMechanismConfig) -> Self {
        Self { class, cfg }
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.class
    }

    pub fn config(&self) -> &ExpMechanismConfig {
        &self.cfg
    }
}

impl Learner for ExpMechanismLearner {
    fn id(&self) -> String {
        "exp".into()
    }

    fn domain_size(&self) -> usize {
        self.class.domain_size()
    }

    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label> {
        self.class.check_point(x)?;
        Ok(exp_mechanism_sample(&self.class, sample, &self.cfg, source)?.at(x))
    }

    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>> {
        Ok(Some(predict_prob(&self.class, sample, x, &self.cfg)?.p_plus))
    }
}

/// The coupled learner: one shared uniform threshold against the exact `p_plus`.
#[derive(Debug, Clone)]
pub struct CoupledLearner {
    class: HypothesisClass,
    cfg: ExpMechanismConfig,
}

impl CoupledLearner {
    pub fn new(class: HypothesisClass, cfg: ExpMechanismConfig) -> Self {
        Self { class, cfg }
    }
}

impl Learner for CoupledLearner {
    fn id(&self) -> String {
        "coupled".into()
    }

    fn domain_size(&self) -> usize {
        self.class.domain_size()
    }

    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label> {
        let r = threshold(&source.named("threshold"));
        coupled_predict(&self.class, sample, x, &self.cfg, r)
    }

    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>> {
        Ok(Some(predict_prob(&self.class, sample, x, &self.cfg)?.p_plus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Example;

    fn two_point_class() -> HypothesisClass {
        HypothesisClass::constants(1).unwrap()
    }

    fn coin_sample(plus: usize, minus: usize) -> Sample {
        let mut v = vec![Example::new(0, Label::Plus); plus];
        v.extend(vec![Example::new(0, Label::Minus); minus]);
        Sample::new(v).unwrap()
    }

    #[test]
    fn equal_losses_give_uniform() {
        let w = exp_weights(&[0.3; 5], 2.0);
        assert!(w.iter().all(|p| (p - 0.2).abs() < 1e-15));
    }

    #[test]
    fn single_hypothesis_has_probability_one() {
        let class = HypothesisClass::new(1, vec![Hypothesis::constant(1, Label::Plus)]).unwrap();
        let cfg = ExpMechanismConfig::new(0.1).unwrap();
        assert_eq!(cfg.temperature(1), 0.0);
        assert_eq!(exp_mechanism_dist(&class, &coin_sample(1, 3), &cfg).unwrap(), vec![1.0]);
    }

    #[test]
    fn two_hypotheses_unit_temperature() {
        // 1/(1+e^{-1}) = 0.7310585786300049, e^{-1}/(1+e^{-1}) = 0.2689414213699951
        let w = exp_weights(&[0.0, 1.0], 1.0);
        assert!((w[0] - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert!((w[1] - 0.268_941_421_369_995_1).abs() < 1e-15);
    }

    #[test]
    fn huge_temperature_does_not_underflow() {
        let w = exp_weights(&[0.0, 0.5, 1.0], 1e6);
        assert_eq!(w[0], 1.0);
        assert!(w.iter().all(|v| v.is_finite()));
        let lw = exp_log_weights(&[0.0, 0.5, 1.0], 1e6);
        assert!((lw[2] + 1e6).abs() < 1e-6);
    }

    #[test]
    fn sampling_frequencies_match_dist() {
        let class = two_point_class();
        let cfg = ExpMechanismConfig::new(0.5).unwrap().with_temperature(1.0).unwrap();
        // plus has loss 0, minus has loss 1
        let s = coin_sample(4, 0);
        let root = RandomSource::from_seed(12);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|&i| exp_mechanism_sample_index(&class, &s, &cfg, &root.child(i)).unwrap() == 0)
            .count();
        let f = hits as f64 / draws as f64;
        assert!((f - 0.731).abs() < 0.01, "{f}");

        let s = coin_sample(2, 2);
        let hits = (0..draws)
            .filter(|&i| exp_mechanism_sample_index(&class, &s, &cfg, &root.child(i)).unwrap() == 0)
            .count();
        assert!((hits as f64 / draws as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn predict_prob_partial_sums() {
        let class = two_point_class();
        let cfg = ExpMechanismConfig::new(0.1).unwrap();
        assert_eq!(predict_prob(&class, &coin_sample(2, 2), Point(0), &cfg).unwrap().p_plus, 0.5);
        let agree = HypothesisClass::new(2, vec![Hypothesis::from_mask(2, 1), Hypothesis::from_mask(2, 3)]).unwrap();
        let s = Sample::new(vec![Example::new(1, Label::Minus)]).unwrap();
        assert_eq!(predict_prob(&agree, &s, Point(0), &cfg).unwrap().p_plus, 1.0);
        assert!(predict_prob(&agree, &s, Point(2), &cfg).is_err());
    }

    #[test]
    fn coupled_threshold_rule() {
        let class = two_point_class();
        let cfg = ExpMechanismConfig::new(0.5).unwrap().with_temperature((0.7f64 / 0.3).ln()).unwrap();
        let s = coin_sample(1, 0);
        let p = predict_prob(&class, &s, Point(0), &cfg).unwrap().p_plus;
        assert!((p - 0.7).abs() < 1e-12);
        assert_eq!(coupled_predict(&class, &s, Point(0), &cfg, 0.5).unwrap(), Label::Plus);
        assert_eq!(coupled_predict(&class, &s, Point(0), &cfg, 0.9).unwrap(), Label::Minus);
        assert!(coupled_predict(&class, &s, Point(0), &cfg, 1.5).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(ExpMechanismConfig::new(0.0).is_err());
        assert!(ExpMechanismConfig::new(1.0).is_err());
        assert!(ExpMechanismConfig::new(0.2).unwrap().with_temperature(-1.0).is_err());
    }
}
