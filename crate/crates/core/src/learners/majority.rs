//! Majority vote over a random subsample of the examples at the query point.
//!
//! When fewer than `k` examples sit at `x`, all of them are used. Ties and
//! the empty case are settled by a fair coin from a dedicated stream.

use rand::seq::index;
use rand::Rng;

use super::Learner;
use crate::domain::{Label, LabelCounts, Point, Sample};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

pub fn majority_subsample_predict(
    sample: &Sample,
    k: usize,
    x: Point,
    source: &RandomSource,
) -> Result<Label> {
    if k == 0 || k > sample.len() {
        return Err(Error::Precondition(format!("subsample size {k} not in [1, {}]", sample.len())));
    }
    let at_x: Vec<Label> = sample.iter().filter(|e| e.point == x).map(|e| e.label).collect();
    let coin = || Label::from_bool(source.named("tie").rng().gen::<bool>());
    if at_x.is_empty() {
        return Ok(coin());
    }
    let take = k.min(at_x.len());
    let chosen = index::sample(&mut source.named("subset").rng(), at_x.len(), take);
    let plus = chosen.iter().filter(|&i| at_x[i] == Label::Plus).count();
    let minus = take - plus;
    Ok(match plus.cmp(&minus) {
        std::cmp::Ordering::Greater => Label::Plus,
        std::cmp::Ordering::Less => Label::Minus,
        std::cmp::Ordering::Equal => coin(),
    })
}

fn ln_binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    let r = r.min(n - r);
    (1..=r).map(|i| ((n - r + i) as f64 / i as f64).ln()).sum()
}

/// Exact `+1` probability given `plus` and `minus` examples at the query
/// point: hypergeometric over the subsample, ties and emptiness worth ½.
pub fn majority_plus_probability(plus: usize, minus: usize, k: usize) -> f64 {
    let total = plus + minus;
    if total == 0 {
        return 0.5;
    }
    let take = k.min(total);
    let denom = ln_binomial(total, take);
    let mut p = 0.0;
    for j in 0..=take.min(plus) {
        if take - j > minus {
            continue;
        }
        let w = (ln_binomial(plus, j) + ln_binomial(minus, take - j) - denom).exp();
        if 2 * j > take {
            p += w;
        } else if 2 * j == take {
            p += 0.5 * w;
        }
    }
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct MajorityLearner {
    k: usize,
    domain_size: usize,
}

impl MajorityLearner {
    pub fn new(domain_size: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("subsample size must be positive".into()));
        }
        Ok(Self { k, domain_size })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Learner for MajorityLearner {
    fn id(&self) -> String {
        "majority".into()
    }

    fn domain_size(&self) -> usize {
        self.domain_size
    }

    fn predict(&self, sample: &Sample, x: Point, source: &RandomSource) -> Result<Label> {
        majority_subsample_predict(sample, self.k.min(sample.len()), x, source)
    }

    fn exact_plus(&self, sample: &Sample, x: Point) -> Result<Option<f64>> {
        let counts = LabelCounts::new(sample, self.domain_size)?;
        Ok(Some(majority_plus_probability(
            counts.count(x, Label::Plus),
            counts.count(x, Label::Minus),
            self.k,
        )))
    }
}
