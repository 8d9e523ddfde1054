//! Lower-bound experiments on the hard bias distribution.

use std::collections::{BTreeMap, BTreeSet};

use super::{ExcessEstimate, Metadata};
use crate::adversaries::{build_scheme_d, PoisoningSchemeD};
use crate::analysis::{oblivious_excess, oblivious_terms, FCache, PoisoningScheme};
use crate::budget::Budget;
use crate::domain::{bayes_loss, BiasVector, Label, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::rng::RandomSource;
use crate::stats::{mean_and_se, normal_ci, Z95};

#[derive(Debug, Clone)]
pub struct LowerBoundReport {
    /// Mean oblivious excess over the outer draws of `u`.
    pub estimate: ExcessEstimate,
    /// `√(dη)/16`.
    pub threshold: f64,
    pub scheme: PoisoningSchemeD,
    /// Distinct bias vectors at which `F` was estimated.
    pub f_points: usize,
    /// Standard error from the outer draws alone.
    pub outer_se: f64,
    /// Standard error propagated from the `F` estimates.
    pub f_se: f64,
    /// `mean ≥ threshold − half-width`.
    pub pass: bool,
}

/// Draws `u ∼ 𝒰^d` `trials_outer` times, estimates `F` at every scheme image
/// with `trials_f` clean samples each, and averages the oblivious excess.
///
/// `F` is cached per distinct bias vector; the interval combines the outer
/// variance with the `F` errors pushed through the (averaged) linear
/// coefficients of the loss.
pub fn lower_bound_experiment(
    learner: &dyn Learner,
    eta: Budget,
    d: usize,
    n: usize,
    trials_outer: usize,
    trials_f: usize,
    source: &RandomSource,
) -> Result<LowerBoundReport> {
    if trials_outer == 0 || trials_f == 0 {
        return Err(Error::Precondition("trial counts must be positive".into()));
    }
    if learner.domain_size() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: learner.domain_size() });
    }
    let (scheme, hard) = build_scheme_d(eta, d)?;
    let outer = source.named("outer");
    let draws: Vec<Vec<i64>> = (0..trials_outer).map(|o| hard.draw_ticks(d, &outer.child(o as u64))).collect();
    let distinct: BTreeSet<Vec<i64>> = draws.iter().cloned().collect();
    let mut needed: BTreeSet<Vec<i64>> = BTreeSet::new();
    for ticks in &distinct {
        for i in 0..d {
            for y in Label::BOTH {
                needed.insert(scheme.apply_ticks(i, y, ticks));
            }
        }
    }
    let points: Vec<BiasVector> = needed.iter().map(|t| scheme.bias_from_ticks(t)).collect::<Result<_>>()?;
    let cache = FCache::fill(learner, &points, n, trials_f, &source.named("f"))?;

    // Per distinct u: excess value and the coefficients of its F terms.
    let mut per_u: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    let mut coef_sum: BTreeMap<(Vec<i64>, usize), f64> = BTreeMap::new();
    for ticks in &distinct {
        let u = scheme.bias_from_ticks(ticks)?;
        per_u.insert(ticks.clone(), oblivious_excess(&cache, &u, &scheme)?.excess);
    }
    for ticks in &draws {
        let u = scheme.bias_from_ticks(ticks)?;
        for (k, term) in oblivious_terms(&u, &scheme)?.into_iter().enumerate() {
            let (i, y) = (k / 2, Label::BOTH[k % 2]);
            let key = (scheme.apply_ticks(i, y, ticks), term.coord);
            *coef_sum.entry(key).or_default() += term.coef / trials_outer as f64;
        }
    }
    let values: Vec<f64> = draws.iter().map(|t| per_u[t]).collect();
    let bayes: Vec<f64> = draws
        .iter()
        .map(|t| Ok(bayes_loss(&ProductBiasDistribution::new(scheme.bias_from_ticks(t)?))))
        .collect::<Result<_>>()?;
    let (bayes_mean, _) = mean_and_se(&bayes);
    let (mean, outer_se) = mean_and_se(&values);
    let mut by_point: BTreeMap<&Vec<i64>, f64> = BTreeMap::new();
    for ((ticks, coord), c) in &coef_sum {
        let table = cache.get(&scheme.bias_from_ticks(ticks)?).expect("filled above");
        *by_point.entry(ticks).or_default() += c.abs() * table.std_errors()[*coord];
    }
    let f_se = by_point.values().map(|s| s * s).sum::<f64>().sqrt();
    let se = (outer_se * outer_se + f_se * f_se).sqrt();
    let ci = normal_ci(mean, se, Z95);
    let threshold = (d as f64 * eta.value()).sqrt() / 16.0;
    let metadata = Metadata {
        experiment: "lower".into(),
        learner: learner.id(),
        adversary: scheme.id(),
        d,
        eta,
        n,
        bias: Vec::new(),
    };
    let estimate = ExcessEstimate::new(mean, ci, trials_outer, source.seed(), bayes_mean, metadata)?;
    let pass = mean >= threshold - Z95 * se;
    Ok(LowerBoundReport { estimate, threshold, scheme, f_points: cache.len(), outer_se, f_se, pass })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub excess: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveReport {
    pub u: BiasVector,
    pub points: Vec<CurvePoint>,
    /// `√(dη)/36`.
    pub threshold: f64,
    /// Fraction of sizes whose excess reaches the threshold.
    pub fraction_above: f64,
}

/// Oblivious excess at a fixed `u` for each sample size.
///
/// Intended for `u` in the support of the hard distribution; the scheme is
/// applied as given.
pub fn learning_curve_experiment(
    learner: &dyn Learner,
    u: &BiasVector,
    scheme: &dyn PoisoningScheme,
    eta: Budget,
    sizes: &[usize],
    trials: usize,
    source: &RandomSource,
) -> Result<CurveReport> {
    if sizes.is_empty() {
        return Err(Error::Empty("size list"));
    }
    let points: Vec<BiasVector> = oblivious_terms(u, scheme)?.into_iter().map(|t| t.point).collect();
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let cache = FCache::fill(learner, &points, n, trials, &source.child(n as u64))?;
        let e = oblivious_excess(&cache, u, scheme)?;
        let (lo, hi) = normal_ci(e.excess, e.std_error, Z95);
        out.push(CurvePoint { n, excess: e.excess, std_error: e.std_error, ci_low: lo, ci_high: hi });
    }
    let threshold = (u.dim() as f64 * eta.value()).sqrt() / 36.0;
    let above = out.iter().filter(|p| p.excess >= threshold).count();
    Ok(CurveReport { u: u.clone(), fraction_above: above as f64 / out.len() as f64, points: out, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::build_scheme_1d;
    use crate::domain::{HypothesisClass, Label};
    use crate::learners::{ConstantLearner, ExpMechanismConfig, ExpMechanismLearner};

    /// Closed-form expected excess of a constant `F ≡ f` over the hard distribution at d = 1.
    fn closed_form(eta: Budget, f: f64) -> f64 {
        let (s, hard) = build_scheme_1d(eta).unwrap();
        hard.atoms()
            .iter()
            .map(|&(k, w)| {
                let u = s.tick_value(k);
                let loss = (0.5 + u) * (0.5 - f) + (0.5 - u) * (0.5 + f);
                w * (loss - (0.5 - u.abs()))
            })
            .sum()
    }

    #[test]
    fn constant_learner_matches_closed_form() {
        let eta = Budget::new(1, 64).unwrap();
        let learner = ConstantLearner::new(1, Label::Plus);
        let r = lower_bound_experiment(&learner, eta, 1, 32, 20_000, 5, &RandomSource::from_seed(1)).unwrap();
        let exact = closed_form(eta, 0.5);
        assert_eq!(r.f_se, 0.0);
        assert!(r.estimate.ci_low <= exact && exact <= r.estimate.ci_high, "{exact} {:?}", r.estimate);
    }

    #[test]
    fn single_outer_draw_is_one_excess_evaluation() {
        let eta = Budget::new(1, 64).unwrap();
        let learner = ConstantLearner::new(1, Label::Minus);
        let r = lower_bound_experiment(&learner, eta, 1, 8, 1, 3, &RandomSource::from_seed(2)).unwrap();
        assert_eq!(r.estimate.trials, 1);
        assert_eq!(r.outer_se, 0.0);
        assert_eq!(r.estimate.ci_low, r.estimate.mean);
    }

    #[test]
    fn flat_curve_for_constant_learner() {
        let eta = Budget::new(1, 64).unwrap();
        let (s, _) = build_scheme_1d(eta).unwrap();
        let u = BiasVector::new(vec![s.tick_value(s.endpoint_tick())]).unwrap();
        let learner = ConstantLearner::new(1, Label::Minus);
        let r = learning_curve_experiment(&learner, &u, &s, eta, &[16, 64, 256], 10, &RandomSource::from_seed(3)).unwrap();
        assert!(r.points.windows(2).all(|w| w[0].excess == w[1].excess));
        // F ≡ −1/2 at u = 7/64: excess = u(1 + 1) = 14/64.
        assert!((r.points[0].excess - 14.0 / 64.0).abs() < 1e-15);
        assert_eq!(r.fraction_above, 1.0);
        let one = learning_curve_experiment(&learner, &u, &s, eta, &[16], 10, &RandomSource::from_seed(3)).unwrap();
        assert_eq!(one.points.len(), 1);
    }

    #[test]
    fn rejects_large_budget() {
        let learner = ExpMechanismLearner::new(HypothesisClass::full(2).unwrap(), ExpMechanismConfig::new(0.1).unwrap());
        assert!(lower_bound_experiment(&learner, Budget::new(1, 2).unwrap(), 2, 8, 1, 1, &RandomSource::from_seed(1)).is_err());
    }
}
