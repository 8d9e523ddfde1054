//! Finite-domain data model: points, labels, samples and explicit hypothesis
//! classes.
//!
//! Labels are stored as ±1. Losses count disagreements, so every loss lies in
//! `[0, 1]`; [`Label::to_bit`] and [`Label::from_bit`] bridge to the `{0,1}`
//! convention (`+1 ↔ 1`, `−1 ↔ 0`).

mod ball;
mod bias;

pub use ball::{ball_enumerate, ball_size, DEFAULT_BALL_CAP};
pub use bias::{
    bayes_loss, dist_tv, draw_example, draw_sample, population_loss, BiasVector,
    ProductBiasDistribution,
};

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Index of a domain element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub usize);

impl Point {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Minus,
    Plus,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Minus, Label::Plus];

    pub fn sign(self) -> f64 {
        match self {
            Label::Minus => -1.0,
            Label::Plus => 1.0,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Minus => Label::Plus,
            Label::Plus => Label::Minus,
        }
    }

    pub fn to_bit(self) -> u8 {
        match self {
            Label::Minus => 0,
            Label::Plus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Label> {
        match bit {
            0 => Ok(Label::Minus),
            1 => Ok(Label::Plus),
            other => Err(Error::InvalidValue(format!("label bit {other}"))),
        }
    }

    /// `+1` when `positive`, otherwise `−1`.
    pub fn from_bool(positive: bool) -> Label {
        if positive {
            Label::Plus
        } else {
            Label::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Example {
    pub point: Point,
    pub label: Label,
}

impl Example {
    pub fn new(point: usize, label: Label) -> Self {
        Self { point: Point(point), label }
    }
}

/// All `(point, label)` pairs of a domain, ordered by point then label.
pub fn full_alphabet(domain_size: usize) -> Vec<Example> {
    (0..domain_size)
        .flat_map(|i| Label::BOTH.into_iter().map(move |y| Example::new(i, y)))
        .collect()
}

/// An ordered, non-empty sequence of examples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sample {
    items: Vec<Example>,
}

impl Sample {
    pub fn new(items: Vec<Example>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty("sample"));
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Example] {
        &self.items
    }

    pub fn get(&self, i: usize) -> Example {
        self.items[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Example> {
        self.items.iter()
    }

    /// Copy with position `i` replaced.
    pub fn with_replaced(&self, i: usize, example: Example) -> Sample {
        let mut items = self.items.clone();
        items[i] = example;
        Sample { items }
    }

    pub(crate) fn replace(&mut self, i: usize, example: Example) {
        self.items[i] = example;
    }

    /// Subsequence at the given (sorted) positions.
    pub fn select(&self, positions: &[usize]) -> Result<Sample> {
        Sample::new(positions.iter().map(|&i| self.items[i]).collect())
    }

    /// Split into the first `at` examples and the rest.
    pub fn split_at(&self, at: usize) -> Result<(Sample, Sample)> {
        let (a, b) = self.items.split_at(at);
        Ok((Sample::new(a.to_vec())?, Sample::new(b.to_vec())?))
    }

    pub fn max_point(&self) -> usize {
        self.items.iter().map(|e| e.point.0).max().unwrap_or(0)
    }

    pub fn check_domain(&self, domain_size: usize) -> Result<()> {
        match self.items.iter().find(|e| e.point.0 >= domain_size) {
            Some(e) => Err(Error::DomainMismatch { index: e.point.0, domain_size }),
            None => Ok(()),
        }
    }
}

/// Number of positions where two samples differ.
pub fn hamming_count(a: &Sample, b: &Sample) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count())
}

/// Normalized Hamming distance between two equal-length samples.
pub fn hamming_distance(a: &Sample, b: &Sample) -> Result<f64> {
    Ok(hamming_count(a, b)? as f64 / a.len() as f64)
}

/// A labeling of every domain point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    values: Vec<Label>,
}

impl Hypothesis {
    pub fn new(values: Vec<Label>) -> Self {
        Self { values }
    }

    pub fn constant(domain_size: usize, label: Label) -> Self {
        Self { values: vec![label; domain_size] }
    }

    /// Bit `i` of `mask` set means `h(x_i) = +1`.
    pub fn from_mask(domain_size: usize, mask: u64) -> Self {
        Self {
            values: (0..domain_size).map(|i| Label::from_bool(mask >> i & 1 == 1)).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Label] {
        &self.values
    }

    pub fn at(&self, x: Point) -> Label {
        self.values[x.0]
    }

    pub fn try_at(&self, x: Point) -> Result<Label> {
        self.values
            .get(x.0)
            .copied()
            .ok_or(Error::DomainMismatch { index: x.0, domain_size: self.values.len() })
    }
}

/// Number of examples in `sample` that `h` mislabels.
pub fn sample_disagreements(h: &Hypothesis, sample: &Sample) -> Result<usize> {
    sample.check_domain(h.domain_size())?;
    Ok(sample.iter().filter(|e| h.at(e.point) != e.label).count())
}

/// Empirical loss: the fraction of examples `h` mislabels.
pub fn sample_loss(h: &Hypothesis, sample: &Sample) -> Result<f64> {
    Ok(sample_disagreements(h, sample)? as f64 / sample.len() as f64)
}

/// Per-point label counts of a sample; enough to evaluate every empirical loss.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCounts {
    counts: Vec<[usize; 2]>,
    n: usize,
}

impl LabelCounts {
    pub fn new(sample: &Sample, domain_size: usize) -> Result<Self> {
        sample.check_domain(domain_size)?;
        let mut counts = vec![[0usize; 2]; domain_size];
        for e in sample.iter() {
            counts[e.point.0][e.label.to_bit() as usize] += 1;
        }
        Ok(Self { counts, n: sample.len() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, x: Point, y: Label) -> usize {
        self.counts[x.0][y.to_bit() as usize]
    }

    pub fn at_point(&self, x: Point) -> usize {
        self.counts[x.0][0] + self.counts[x.0][1]
    }

    pub fn disagreements(&self, h: &Hypothesis) -> usize {
        self.counts
            .iter()
            .zip(h.values())
            .map(|(c, y)| c[y.flip().to_bit() as usize])
            .sum()
    }

    pub fn loss(&self, h: &Hypothesis) -> f64 {
        self.disagreements(h) as f64 / self.n as f64
    }
}

/// An explicit finite class of distinct hypotheses on a common domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    domain_size: usize,
    hypotheses: Vec<Hypothesis>,
}

impl HypothesisClass {
    pub fn new(domain_size: usize, hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::Empty("hypothesis class"));
        }
        let mut seen = HashSet::with_capacity(hypotheses.len());
        for h in &hypotheses {
            if h.domain_size() != domain_size {
                return Err(Error::DimensionMismatch { expected: domain_size, actual: h.domain_size() });
            }
            if !seen.insert(h) {
                return Err(Error::InvalidValue("duplicate hypothesis in class".into()));
            }
        }
        Ok(Self { domain_size, hypotheses })
    }

    /// All `2^N` labelings; hypothesis `j` labels `x_i` with `+1` iff bit `i` of `j` is set.
    pub fn full(domain_size: usize) -> Result<Self> {
        if domain_size == 0 || domain_size > 20 {
            return Err(Error::ScopeExceeded(format!("full class on {domain_size} points")));
        }
        let hs = (0..1u64 << domain_size).map(|m| Hypothesis::from_mask(domain_size, m)).collect();
        Self::new(domain_size, hs)
    }

    /// The two constant hypotheses, all `+1` first.
    pub fn constants(domain_size: usize) -> Result<Self> {
        Self::new(
            domain_size,
            vec![
                Hypothesis::constant(domain_size, Label::Plus),
                Hypothesis::constant(domain_size, Label::Minus),
            ],
        )
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn get(&self, i: usize) -> &Hypothesis {
        &self.hypotheses[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hypothesis> {
        self.hypotheses.iter()
    }

    /// Empirical losses of every hypothesis, in class order.
    pub fn losses(&self, sample: &Sample) -> Result<Vec<f64>> {
        let counts = LabelCounts::new(sample, self.domain_size)?;
        Ok(self.hypotheses.iter().map(|h| counts.loss(h)).collect())
    }

    pub fn check_point(&self, x: Point) -> Result<()> {
        if x.0 >= self.domain_size {
            return Err(Error::DomainMismatch { index: x.0, domain_size: self.domain_size });
        }
        Ok(())
    }
}
