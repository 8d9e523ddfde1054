//! Private-to-public randomness transform.
//!
//! A private learner induces the map `A(S)(x) = E_r A_priv,r(S)(x)`. The
//! public learner thresholds that value at a shared uniform `r`, which makes
//! its output monotone in `A(S)(x)` for every fixed `r`.

use super::Learner;
use crate::domain::{Label, Point, Sample};
use crate::error::{Error, Result};
use crate::rng::{threshold, RandomSource};

/// Inner draws used when the private learner has no exact `p_plus`.
pub const DEFAULT_INNER_DRAWS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub p_plus: f64,
    /// `None` for exact values, otherwise the Monte Carlo draw count.
    pub inner_draws: Option<usize>,
}

pub trait PlusOracle {
    fn plus(&self, sample: &Sample, x: Point) -> Result<OracleValue>;
}

impl<F> PlusOracle for F
where
    F: Fn(&Sample, Point) -> Result<f64>,
{
    fn plus(&self, sample: &Sample, x: Point) -> Result<OracleValue> {
        Ok(OracleValue { p_plus: self(sample, x)?, inner_draws: None })
    }
}

/// Exact oracle backed by [`Learner::exact_plus`]; fails if the learner has none.
pub struct ExactOracle<'a> {
    learner: &'a dyn Learner,
}

impl<'a> ExactOracle<'a> {
    pub fn new(learner: &'a dyn Learner) -> Self {
        Self { learner }
    }
}

impl PlusOracle for ExactOracle<'_> {
    fn plus(&self, sample: &Sample, x: Point) -> Result<OracleValue> {
        match self.learner.exact_plus(sample, x)? {
            Some(p) => Ok(OracleValue { p_plus: p, inner_draws: None }),
            None => Err(Error::Precondition(format!(
                "learner {} has no exact prediction probability",
                self.learner.id()
            ))),
        }
    }
}

/// Monte Carlo estimate of `p_plus` from repeated black-box predictions.
pub struct MonteCarloOracle<'a> {
    learner: &'a dyn Learner,
    draws: usize,
    source: RandomSource,
}

impl<'a> MonteCarloOracle<'a> {
    pub fn new(learner: &'a dyn Learner, draws: usize, source: RandomSource) -> Self {
        Self { learner, draws: draws.max(1), source }
    }
}

impl PlusOracle for MonteCarloOracle<'_> {
    fn plus(&self, sample: &Sample, x: Point) -> Result<OracleValue> {
        let mut plus = 0usize;
        for i in 0..self.draws {
            if self.learner.predict(sample, x, &self.source.child(i as u64))? == Label::Plus {
                plus += 1;
            }
        }
        Ok(OracleValue { p_plus: plus as f64 / self.draws as f64, inner_draws: Some(self.draws) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublicPrediction {
    pub label: Label,
    pub oracle: OracleValue,
}

/// `+1` iff `r ≤ A(S)(x)`.
pub fn public_transform(
    oracle: &dyn PlusOracle,
    sample: &Sample,
    x: Point,
    r: f64,
) -> Result<PublicPrediction> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidValue(format!("threshold {r} outside [0,1]")));
    }
    let value = oracle.plus(sample, x)?;
    Ok(PublicPrediction { label: Label::from_bool(r <= value.p_plus), oracle: value })
}

/// Public-randomness learner built from a private one.
pub struct PublicLearner {
    private: Box<dyn Learner>,
    inner_draws: usize,
}

impl PublicLearner {
    pub fn new(private: Box<dyn Learner>) -> Self {
        Self { private, inner_draws: DEFAULT_INNER_DRAWS }
    }

    pub fn with_inner_draws(mut self, draws: usize) -> Self {
        self.inner_draws = draws.max(1);
        self
    }

    fn oracle_value(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<OracleValue> {
        match self.private.exact_plus(sample, x)? {
            Some(p) => Ok(OracleValue { p_plus: p, inner_draws: None }),
            None => MonteCarloOracle::new(self.private.as_ref(), self.inner_draws, source.named("public-inner"))
                .plus(sample, x),
        }
    }
}

impl Learner for PublicLearner {
    fn id(&self) -> String {
        format!("public({})", self.private.id())
    }

    fn domain_size(&self) -> usize {
        self.private.domain_size()
    }

    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label> {
        let r = threshold(&source.named("public-threshold"));
        let value = self.oracle_value(sample, x, source)?;
        Ok(Label::from_bool(r <= value.p_plus))
    }

    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>> {
        self.private.exact_plus(sample, x)
    }

    fn plus_probability(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<f64> {
        Ok(self.oracle_value(sample, x, source)?.p_plus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::domain::{Example, HypothesisClass};
    use crate::learners::{predict_prob, CoinLearner, ConstantLearner, ExpMechanismConfig, ExpMechanismLearner};
    use rand::SeedableRng;

    fn sample(plus: usize, minus: usize) -> Sample {
        let mut v = vec![Example::new(0, Label::Plus); plus];
        v.extend(vec![Example::new(0, Label::Minus); minus]);
        Sample::new(v).unwrap()
    }

    #[test]
    fn deterministic_private_is_reproduced() {
        let learner = ConstantLearner::new(1, Label::Minus);
        let oracle = ExactOracle::new(&learner);
        // Thresholds are drawn from (0, 1].
        for r in [1e-300, 0.3, 0.999, 1.0] {
            let out = public_transform(&oracle, &sample(1, 1), Point(0), r).unwrap();
            assert_eq!(out.label, Label::Minus);
        }
        let plus = ConstantLearner::new(1, Label::Plus);
        for r in [1e-300, 0.5, 1.0] {
            assert_eq!(public_transform(&ExactOracle::new(&plus), &sample(1, 1), Point(0), r).unwrap().label, Label::Plus);
        }
    }

    #[test]
    fn half_oracle_gives_half() {
        let oracle = |_: &Sample, _: Point| -> Result<f64> { Ok(0.5) };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let plus = (0..n)
            .filter(|_| public_transform(&oracle, &sample(1, 0), Point(0), rng.gen()).unwrap().label == Label::Plus)
            .count();
        assert!((plus as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn exp_mechanism_law_matches_predict_prob() {
        let class = HypothesisClass::constants(1).unwrap();
        let cfg = ExpMechanismConfig::new(0.1).unwrap();
        let learner = ExpMechanismLearner::new(class.clone(), cfg);
        let s = sample(3, 2);
        let exact = predict_prob(&class, &s, Point(0), &cfg).unwrap().p_plus;
        // Pr_r[r ≤ p] = p: the marginal law is the oracle value itself.
        let value = public_transform(&ExactOracle::new(&learner), &s, Point(0), 0.0).unwrap().oracle;
        assert!((value.p_plus - exact).abs() < 1e-12);
        assert_eq!(value.inner_draws, None);
        let public = PublicLearner::new(Box::new(learner));
        assert!((public.exact_plus(&s, Point(0)).unwrap().unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn black_box_uses_declared_draws() {
        let coin = CoinLearner::new(1);
        let oracle = MonteCarloOracle::new(&coin, DEFAULT_INNER_DRAWS, RandomSource::from_seed(4));
        let out = public_transform(&oracle, &sample(1, 0), Point(0), 0.2).unwrap();
        assert_eq!(out.oracle.inner_draws, Some(4096));
        assert!((out.oracle.p_plus - 0.5).abs() < 0.05);
        assert!(public_transform(&ExactOracle::new(&coin), &sample(1, 0), Point(0), 0.2).is_err());
    }

    #[test]
    fn monotone_in_oracle_value() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let (p1, p2): (f64, f64) = (rng.gen(), rng.gen());
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let r: f64 = rng.gen();
            let a = public_transform(&move |_: &Sample, _: Point| -> Result<f64> { Ok(lo) }, &sample(1, 0), Point(0), r).unwrap();
            let b = public_transform(&move |_: &Sample, _: Point| -> Result<f64> { Ok(hi) }, &sample(1, 0), Point(0), r).unwrap();
            assert!(a.label == Label::Minus || b.label == Label::Plus);
        }
    }
}
