use rand::Rng;

use super::{Example, Hypothesis, Label, Point, Sample};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Per-point label biases `u ∈ [-1/2, 1/2]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVector {
    coords: Vec<f64>,
}

impl BiasVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("bias vector"));
        }
        if let Some(c) = coords.iter().find(|c| !(-0.5..=0.5).contains(*c)) {
            return Err(Error::InvalidValue(format!("bias coordinate {c} outside [-1/2, 1/2]")));
        }
        Ok(Self { coords })
    }

    pub fn uniform(d: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; d])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// Copy with coordinate `i` replaced.
    pub fn with_coord(&self, i: usize, value: f64) -> Result<Self> {
        let mut coords = self.coords.clone();
        coords[i] = value;
        Self::new(coords)
    }
}

/// The uniform-marginal distribution `D_u` over `d` points:
/// `Pr[(x_i, y)] = (1/d)(1/2 + y·u_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBiasDistribution {
    bias: BiasVector,
}

impl ProductBiasDistribution {
    pub fn new(bias: BiasVector) -> Self {
        Self { bias }
    }

    pub fn bias(&self) -> &BiasVector {
        &self.bias
    }

    pub fn dim(&self) -> usize {
        self.bias.dim()
    }

    pub fn prob(&self, e: Example) -> f64 {
        let d = self.dim() as f64;
        (0.5 + e.label.sign() * self.bias.get(e.point.0)) / d
    }

    /// All `2d` atoms with their probabilities, ordered by point then label (`−1` first).
    pub fn atoms(&self) -> Vec<(Example, f64)> {
        super::full_alphabet(self.dim())
            .into_iter()
            .map(|e| (e, self.prob(e)))
            .collect()
    }
}

/// Population loss of `h` under `D_u`, in closed form.
pub fn population_loss(h: &Hypothesis, dist: &ProductBiasDistribution) -> Result<f64> {
    if h.domain_size() != dist.dim() {
        return Err(Error::DimensionMismatch { expected: dist.dim(), actual: h.domain_size() });
    }
    let u = dist.bias().coords();
    let total: f64 = h.values().iter().zip(u).map(|(y, ui)| 0.5 - y.sign() * ui).sum();
    Ok(total / u.len() as f64)
}

/// The smallest population loss over all labelings of the `d` points.
pub fn bayes_loss(dist: &ProductBiasDistribution) -> f64 {
    let u = dist.bias().coords();
    u.iter().map(|ui| (0.5 - ui).min(0.5 + ui)).sum::<f64>() / u.len() as f64
}

/// `(1/d)·‖u − u'‖₁`, the total variation distance between `D_u` and `D_u'`.
pub fn dist_tv(u: &BiasVector, v: &BiasVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), actual: v.dim() });
    }
    let sum: f64 = u.coords().iter().zip(v.coords()).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / u.dim() as f64)
}

/// One example drawn from `D_u` using the given generator.
pub fn draw_example<R: Rng + ?Sized>(dist: &ProductBiasDistribution, rng: &mut R) -> Example {
    let d = dist.dim();
    let i = if d == 1 { 0 } else { rng.gen_range(0..d) };
    let threshold = 0.5 + dist.bias().get(i);
    Example { point: Point(i), label: Label::from_bool(rng.gen::<f64>() < threshold) }
}

/// `n` i.i.d. examples from `D_u`.
pub fn draw_sample(dist: &ProductBiasDistribution, n: usize, source: &RandomSource) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Precondition("sample size must be at least 1".into()));
    }
    let mut rng = source.rng();
    Sample::new((0..n).map(|_| draw_example(dist, &mut rng)).collect())
}
