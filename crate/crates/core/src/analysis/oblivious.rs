//! The F-function of a learner and oblivious losses in closed form.
//!
//! For a learner `A` and sample size `n`, `F_i(u) = p_plus − 1/2` averaged
//! over clean samples `S ∼ D_u^n` at point `x_i`. An oblivious adversary
//! shifts `u` through a poisoning scheme `ξ_{i,y}`, and the resulting loss is
//! the affine function `1/2 + Σ_{i,y} c_{i,y} · F_i(ξ_{i,y}(u))` with
//! `c_{i,y} = −(1/d)(1/2 + y·u_i)·y`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::domain::{bayes_loss, draw_sample, BiasVector, Label, Point, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::rng::{fnv1a64, RandomSource};
use crate::stats::mean_and_se;

/// Largest sample size [`exact_f_1d`] enumerates.
pub const EXACT_F_MAX_N: usize = 14;

/// A label-indexed family of maps on bias vectors.
pub trait PoisoningScheme: Send + Sync {
    fn id(&self) -> String;

    fn dim(&self) -> usize;

    /// `ξ_{i,y}(u)`.
    fn apply(&self, i: usize, y: Label, u: &BiasVector) -> Result<BiasVector>;
}

/// The scheme that never moves `u`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityScheme {
    d: usize,
}

impl IdentityScheme {
    pub fn new(d: usize) -> Self {
        Self { d }
    }
}

impl PoisoningScheme for IdentityScheme {
    fn id(&self) -> String {
        "identity".into()
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, _i: usize, _y: Label, u: &BiasVector) -> Result<BiasVector> {
        Ok(u.clone())
    }
}

/// `F(u)` for one bias vector, with per-coordinate standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FTable {
    u: BiasVector,
    values: Vec<f64>,
    n: usize,
    trials: usize,
    std_errors: Vec<f64>,
}

impl FTable {
    pub fn new(u: BiasVector, values: Vec<f64>, n: usize, trials: usize, std_errors: Vec<f64>) -> Result<Self> {
        let d = u.dim();
        for len in [values.len(), std_errors.len()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, actual: len });
            }
        }
        if let Some(v) = values.iter().find(|v| !(v.abs() <= 0.5 + 1e-12)) {
            return Err(Error::InvalidValue(format!("F value {v} outside [-1/2, 1/2]")));
        }
        if let Some(s) = std_errors.iter().find(|s| !(**s >= 0.0)) {
            return Err(Error::InvalidValue(format!("standard error {s} is negative")));
        }
        let values = values.into_iter().map(|v| v.clamp(-0.5, 0.5)).collect();
        Ok(Self { u, values, n, trials, std_errors })
    }

    /// An exact table: zero standard errors and no trials.
    pub fn exact(u: BiasVector, values: Vec<f64>, n: usize) -> Result<Self> {
        let d = u.dim();
        Self::new(u, values, n, 0, vec![0.0; d])
    }

    pub fn u(&self) -> &BiasVector {
        &self.u
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn std_errors(&self) -> &[f64] {
        &self.std_errors
    }
}

/// Monte Carlo `F` at `u`: trial `t` draws a clean sample from stream
/// `source.child(t)` and records `p_plus − 1/2` at every point.
pub fn estimate_f(
    learner: &dyn Learner,
    u: &BiasVector,
    n: usize,
    trials: usize,
    source: &RandomSource,
) -> Result<FTable> {
    if trials == 0 {
        return Err(Error::Precondition("estimate_f needs at least one trial".into()));
    }
    if learner.domain_size() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), actual: learner.domain_size() });
    }
    let d = u.dim();
    let dist = ProductBiasDistribution::new(u.clone());
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let src = source.child(t as u64);
            let sample = draw_sample(&dist, n, &src.named("sample"))?;
            let inner = src.named("learner");
            (0..d)
                .map(|i| Ok(learner.plus_probability(&sample, Point(i), &inner.child(i as u64))? - 0.5))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(d);
    let mut errors = Vec::with_capacity(d);
    let mut column = vec![0.0; trials];
    for i in 0..d {
        column.iter_mut().zip(&rows).for_each(|(c, r)| *c = r[i]);
        let (m, se) = mean_and_se(&column);
        values.push(m);
        errors.push(se);
    }
    FTable::new(u.clone(), values, n, trials, errors)
}

/// Exact `F` on a single point by summing over all `2^n` label sequences.
pub fn exact_f_1d(learner: &dyn Learner, u: f64, n: usize) -> Result<f64> {
    if learner.domain_size() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, actual: learner.domain_size() });
    }
    if n == 0 || n > EXACT_F_MAX_N {
        return Err(Error::ScopeExceeded(format!("exact F needs 1 <= n <= {EXACT_F_MAX_N}, got {n}")));
    }
    BiasVector::new(vec![u])?;
    let (p, q) = (0.5 + u, 0.5 - u);
    let mut total = 0.0;
    for mask in 0u32..1 << n {
        let plus = mask.count_ones() as i32;
        let weight = p.powi(plus) * q.powi(n as i32 - plus);
        if weight == 0.0 {
            continue;
        }
        let items = (0..n)
            .map(|j| crate::domain::Example::new(0, Label::from_bool(mask >> j & 1 == 1)))
            .collect();
        let sample = crate::domain::Sample::new(items)?;
        let p_plus = learner.exact_plus(&sample, Point(0))?.ok_or_else(|| {
            Error::Precondition(format!("learner {} has no exact prediction probability", learner.id()))
        })?;
        total += weight * (p_plus - 0.5);
    }
    Ok(total)
}

/// Source of `F_i(v)` values with standard errors.
pub trait FOracle: Sync {
    fn f_at(&self, v: &BiasVector, i: usize) -> Result<(f64, f64)>;
}

impl<G> FOracle for G
where
    G: Fn(&BiasVector, usize) -> Result<f64> + Sync,
{
    fn f_at(&self, v: &BiasVector, i: usize) -> Result<(f64, f64)> {
        Ok((self(v, i)?, 0.0))
    }
}

fn bias_key(v: &BiasVector) -> Vec<u64> {
    v.coords().iter().map(|c| c.to_bits()).collect()
}

fn bias_hash(v: &BiasVector) -> u64 {
    let bytes: Vec<u8> = bias_key(v).iter().flat_map(|b| b.to_le_bytes()).collect();
    fnv1a64(&bytes)
}

/// Precomputed F tables keyed by the exact bits of the bias vector.
#[derive(Debug, Clone, Default)]
pub struct FCache {
    tables: HashMap<Vec<u64>, FTable>,
}

impl FCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: FTable) {
        self.tables.insert(bias_key(table.u()), table);
    }

    pub fn get(&self, v: &BiasVector) -> Option<&FTable> {
        self.tables.get(&bias_key(v))
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Estimates F at every point. The stream for a point depends only on
    /// the point, so the same point always gets the same table.
    pub fn fill(
        learner: &dyn Learner,
        points: &[BiasVector],
        n: usize,
        trials: usize,
        source: &RandomSource,
    ) -> Result<Self> {
        let mut unique: Vec<BiasVector> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for p in points {
            if seen.insert(bias_key(p)) {
                unique.push(p.clone());
            }
        }
        let tables: Vec<FTable> = unique
            .par_iter()
            .map(|p| estimate_f(learner, p, n, trials, &source.child(bias_hash(p))))
            .collect::<Result<_>>()?;
        let mut cache = Self::new();
        tables.into_iter().for_each(|t| cache.insert(t));
        Ok(cache)
    }
}

impl FOracle for FCache {
    fn f_at(&self, v: &BiasVector, i: usize) -> Result<(f64, f64)> {
        let table = self.get(v).ok_or_else(|| Error::MissingEvaluation(format!("{:?}", v.coords())))?;
        Ok((table.values()[i], table.std_errors()[i]))
    }
}

/// One `c · F_i(point)` term of the oblivious loss.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliviousTerm {
    pub point: BiasVector,
    pub coord: usize,
    pub coef: f64,
}

/// The `2d` terms of the oblivious loss at `u`; the loss is `1/2 + Σ coef·F`.
pub fn oblivious_terms(u: &BiasVector, scheme: &dyn PoisoningScheme) -> Result<Vec<ObliviousTerm>> {
    let d = u.dim();
    if scheme.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: scheme.dim() });
    }
    let mut terms = Vec::with_capacity(2 * d);
    for i in 0..d {
        for y in Label::BOTH {
            let point = scheme.apply(i, y, u)?;
            let coef = -(0.5 + y.sign() * u.get(i)) * y.sign() / d as f64;
            terms.push(ObliviousTerm { point, coord: i, coef });
        }
    }
    Ok(terms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObliviousExcess {
    pub loss: f64,
    pub excess: f64,
    pub std_error: f64,
}

/// Oblivious loss and excess of `F` at `u` under `scheme`.
///
/// The standard error treats tables at distinct points as independent and
/// bounds correlated coordinates at one point by adding their contributions.
pub fn oblivious_excess(f: &dyn FOracle, u: &BiasVector, scheme: &dyn PoisoningScheme) -> Result<ObliviousExcess> {
    let terms = oblivious_terms(u, scheme)?;
    let mut loss = 0.5;
    // point -> coord -> (summed coefficient, se)
    let mut grouped: BTreeMap<Vec<u64>, BTreeMap<usize, (f64, f64)>> = BTreeMap::new();
    for t in &terms {
        let (value, se) = f.f_at(&t.point, t.coord)?;
        loss += t.coef * value;
        let entry = grouped.entry(bias_key(&t.point)).or_default().entry(t.coord).or_insert((0.0, se));
        entry.0 += t.coef;
    }
    let var: f64 = grouped
        .values()
        .map(|coords| {
            let s: f64 = coords.values().map(|(c, se)| c.abs() * se).sum();
            s * s
        })
        .sum();
    let excess = loss - bayes_loss(&ProductBiasDistribution::new(u.clone()));
    Ok(ObliviousExcess { loss, excess, std_error: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::HypothesisClass;
    use crate::learners::{CoinLearner, ConstantLearner, ExpMechanismConfig, ExpMechanismLearner};

    fn constant_f(c: f64) -> impl Fn(&BiasVector, usize) -> Result<f64> + Sync {
        move |_: &BiasVector, _: usize| Ok(c)
    }

    #[test]
    fn endpoint_formula() {
        let scheme = IdentityScheme::new(1);
        for &u in &[0.109375, -0.109375, 0.3, -0.05] {
            for &fv in &[-0.5, -0.2, 0.0, 0.31, 0.5] {
                let uv = BiasVector::new(vec![u]).unwrap();
                let got = oblivious_excess(&constant_f(fv), &uv, &scheme).unwrap();
                let expect = u.abs() * (1.0 - 2.0 * u.signum() * fv);
                assert!((got.excess - expect).abs() < 1e-15, "{u} {fv}");
                assert_eq!(got.std_error, 0.0);
            }
        }
        let t = BiasVector::new(vec![7.0 / 64.0]).unwrap();
        assert!(oblivious_excess(&constant_f(0.5), &t, &scheme).unwrap().excess.abs() < 1e-15);
        assert!((oblivious_excess(&constant_f(0.0), &t, &scheme).unwrap().excess - 7.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn bayes_predictor_has_zero_excess() {
        let bayes = |v: &BiasVector, i: usize| -> Result<f64> { Ok(0.5 * v.get(i).signum()) };
        for coords in [vec![0.1, -0.3, 0.5], vec![-0.5], vec![0.01, 0.2]] {
            let u = BiasVector::new(coords).unwrap();
            let e = oblivious_excess(&bayes, &u, &IdentityScheme::new(u.dim())).unwrap();
            assert!(e.excess.abs() < 1e-15);
        }
    }

    #[test]
    fn estimate_f_constant_and_coin() {
        let u = BiasVector::new(vec![0.2, -0.1]).unwrap();
        let plus = ConstantLearner::new(2, Label::Plus);
        let t = estimate_f(&plus, &u, 5, 50, &RandomSource::from_seed(1)).unwrap();
        assert_eq!(t.values(), &[0.5, 0.5]);
        let coin = CoinLearner::new(2);
        let t = estimate_f(&coin, &u, 5, 10_000, &RandomSource::from_seed(2)).unwrap();
        for i in 0..2 {
            assert!(t.values()[i].abs() <= 3.0 * t.std_errors()[i]);
        }
    }

    #[test]
    fn estimate_f_exp_mechanism_noiseless() {
        let learner = ExpMechanismLearner::new(HypothesisClass::constants(1).unwrap(), ExpMechanismConfig::new(1.0 / 64.0).unwrap());
        let u = BiasVector::new(vec![0.5]).unwrap();
        let t = estimate_f(&learner, &u, 16, 10_000, &RandomSource::from_seed(3)).unwrap();
        // All labels +1: p_plus = 1/(1 + e^{−t}) with t = √(64 ln 2), so F ≈ 0.4987.
        assert!(t.values()[0] >= 0.49 && t.values()[0] <= 0.5);
    }

    #[test]
    fn estimate_f_agrees_with_exact_oracle() {
        let learner = ExpMechanismLearner::new(HypothesisClass::constants(1).unwrap(), ExpMechanismConfig::new(1.0 / 16.0).unwrap());
        for &u in &[-0.2, 0.0, 0.15] {
            let exact = exact_f_1d(&learner, u, 10).unwrap();
            let est = estimate_f(&learner, &BiasVector::new(vec![u]).unwrap(), 10, 20_000, &RandomSource::from_seed(4)).unwrap();
            assert!((est.values()[0] - exact).abs() <= 4.0 * est.std_errors()[0] + 1e-12, "{u}");
        }
        assert!(exact_f_1d(&learner, 0.1, 15).is_err());
    }

    #[test]
    fn estimate_f_is_reproducible() {
        let learner = ExpMechanismLearner::new(HypothesisClass::full(2).unwrap(), ExpMechanismConfig::new(0.05).unwrap());
        let u = BiasVector::new(vec![0.1, -0.2]).unwrap();
        let a = estimate_f(&learner, &u, 20, 300, &RandomSource::from_seed(9)).unwrap();
        let b = estimate_f(&learner, &u, 20, 300, &RandomSource::from_seed(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.values().iter().all(|v| v.abs() <= 0.5));
    }

    #[test]
    fn cache_reports_missing_points() {
        let cache = FCache::new();
        let u = BiasVector::new(vec![0.0]).unwrap();
        assert!(matches!(oblivious_excess(&cache, &u, &IdentityScheme::new(1)), Err(Error::MissingEvaluation(_))));
    }
}
