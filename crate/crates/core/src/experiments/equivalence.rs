//! Exact comparisons between adversary models on tiny one-point instances.

use super::ExhaustiveTable;
use crate::adversaries::build_scheme_1d;
use crate::budget::Budget;
use crate::domain::{BiasVector, Example, Label, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::learners::Learner;

/// Largest sample size the exact comparisons accept.
const MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub u: f64,
    pub eta: Budget,
    pub n: usize,
    /// `L_{D,2η}(A, n)`.
    pub sample_loss: f64,
    /// `e^{−nη/3}`.
    pub tail: f64,
    /// Oblivious loss with the sup restricted to the candidate shifts.
    pub oblivious_loss: f64,
    /// `sample_loss + tail − oblivious_loss`.
    pub slack: f64,
    pub holds: bool,
}

fn dist_at(v: f64) -> Result<ProductBiasDistribution> {
    Ok(ProductBiasDistribution::new(BiasVector::new(vec![v])?))
}

fn check_instance(learner: &dyn Learner, n: usize) -> Result<()> {
    if learner.domain_size() != 1 {
        return Err(Error::ScopeExceeded(format!("exact comparison needs d = 1, got {}", learner.domain_size())));
    }
    if n == 0 || n > MAX_N {
        return Err(Error::ScopeExceeded(format!("exact comparison needs 1 <= n <= {MAX_N}, got {n}")));
    }
    Ok(())
}

/// Checks `L_{D,2η}(A, n) + e^{−nη/3} ≥ L^obl_{D,η}(A, n)` exactly.
///
/// The oblivious sup ranges over `u`, the grid-scheme image `ξ_y(u)` and
/// the clamped shift `u − y·η`; each is within distance `η` of `u`.
/// Restricting the sup only lowers the right side.
pub fn equivalence_check(learner: &dyn Learner, u: f64, eta: Budget, n: usize) -> Result<EquivalenceReport> {
    check_instance(learner, n)?;
    let table = ExhaustiveTable::new(learner, n)?;
    let dist = dist_at(u)?;
    let sample_loss = table.adversarial_loss(&dist, eta.max_changes(2, n))?;
    let tail = (-(n as f64) * eta.value() / 3.0).exp();
    let (scheme, _) = build_scheme_1d(eta)?;
    let mut oblivious_loss = 0.0;
    for y in Label::BOTH {
        let target = Example::new(0, y);
        let pz = dist.prob(target);
        let candidates = [u, scheme.xi(y, u), (u - y.sign() * eta.value()).clamp(-0.5, 0.5)];
        let mut best = 0.0f64;
        for v in candidates {
            debug_assert!((v - u).abs() <= eta.value() + 1e-15);
            best = best.max(table.clean_error(&dist_at(v)?, target)?);
        }
        oblivious_loss += pz * best;
    }
    let slack = sample_loss + tail - oblivious_loss;
    Ok(EquivalenceReport { u, eta, n, sample_loss, tail, oblivious_loss, slack, holds: slack >= -1e-9 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PublicDominationReport {
    pub u: f64,
    pub eta: Budget,
    pub n: usize,
    /// `L_{D,η}(A_priv)`: the adversary does not see the learner's randomness.
    pub private_loss: f64,
    /// `L^pub_{D,η}(A_pub)`: the adversary sees the threshold `r`.
    pub public_loss: f64,
    pub holds: bool,
}

/// Lebesgue measure of a union of intervals in `[0, 1]`.
fn union_measure(mut intervals: Vec<(f64, f64)>) -> f64 {
    intervals.retain(|(a, b)| b > a);
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for (a, b) in intervals {
        current = match current {
            Some((s, e)) if a <= e => Some((s, e.max(b))),
            Some((s, e)) => {
                total += e - s;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((s, e)) = current {
        total += e - s;
    }
    total
}

/// Compares the public-randomness loss of the threshold learner
/// (`+1` iff `r ≤ p_plus`) against the private-randomness loss of `learner`.
///
/// For a fixed sample and target, the public adversary wins on the union
/// over the ball of the thresholds `r` at which some `S'` errs; that union
/// is measured directly.
pub fn public_domination_check(learner: &dyn Learner, u: f64, eta: Budget, n: usize) -> Result<PublicDominationReport> {
    check_instance(learner, n)?;
    let table = ExhaustiveTable::new(learner, n)?;
    let dist = dist_at(u)?;
    let radius = eta.max_changes(1, n);
    let private_loss = table.adversarial_loss(&dist, radius)?;
    let mut public_loss = 0.0;
    for idx in 0..table.len() {
        let w = table.weight(idx, &dist);
        if w == 0.0 {
            continue;
        }
        for y in Label::BOTH {
            let target = Example::new(0, y);
            let mut intervals = Vec::new();
            table.for_each_in_ball(idx, radius, &mut |j| {
                let p = table.p_plus(j, target.point);
                intervals.push(match y {
                    Label::Plus => (p, 1.0),
                    Label::Minus => (0.0, p),
                });
            });
            public_loss += w * dist.prob(target) * union_measure(intervals);
        }
    }
    Ok(PublicDominationReport { u, eta, n, private_loss, public_loss, holds: public_loss <= private_loss + 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::HypothesisClass;
    use crate::learners::{ExpMechanismConfig, ExpMechanismLearner};

    fn exp_learner(eta: Budget) -> ExpMechanismLearner {
        ExpMechanismLearner::new(HypothesisClass::constants(1).unwrap(), ExpMechanismConfig::from_budget(eta))
    }

    #[test]
    fn union_measure_examples() {
        assert_eq!(union_measure(vec![]), 0.0);
        assert!((union_measure(vec![(0.1, 0.3), (0.2, 0.5), (0.7, 0.8)]) - 0.5).abs() < 1e-15);
        assert!((union_measure(vec![(0.4, 1.0), (0.6, 1.0)]) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_case() {
        // ⌊2ηn⌋ = 0 needs 2η·n < 1: η = 1/8, n = 3.
        let eta = Budget::new(1, 8).unwrap();
        let r = equivalence_check(&exp_learner(eta), 0.1, eta, 3).unwrap();
        assert!(r.holds);
        assert!((r.tail - (-3.0f64 / 24.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn reference_instance() {
        let eta = Budget::new(1, 4).unwrap();
        let r = equivalence_check(&exp_learner(eta), 0.125, eta, 4).unwrap();
        assert!(r.holds && r.slack > 0.0, "{r:?}");
        let zero = equivalence_check(&exp_learner(eta), 0.0, eta, 4).unwrap();
        assert!(zero.holds);
    }

    #[test]
    fn public_equals_private_for_thresholds() {
        let eta = Budget::new(1, 4).unwrap();
        for u in [-0.3, 0.0, 0.2] {
            let r = public_domination_check(&exp_learner(eta), u, eta, 4).unwrap();
            assert!(r.holds);
            assert!((r.public_loss - r.private_loss).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_large_instances() {
        let eta = Budget::new(1, 4).unwrap();
        assert!(equivalence_check(&exp_learner(eta), 0.0, eta, 9).is_err());
    }
}
