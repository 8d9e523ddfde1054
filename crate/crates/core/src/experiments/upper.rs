//! Upper-bound experiments for the subsample-cover learner.

use super::{mc_adversarial_loss, ExcessEstimate};
use crate::adversaries::Adversary;
use crate::budget::Budget;
use crate::domain::{BiasVector, HypothesisClass, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::learners::{VcLearner, VcLearnerConfig};
use crate::rng::RandomSource;

/// `36·√(ηd)·ln(e/(ηd))`.
pub fn upper_bound(eta: Budget, d: usize) -> f64 {
    let x = eta.value() * d as f64;
    36.0 * x.sqrt() * (std::f64::consts::E / x).ln()
}

/// The clean-learning term `32·√(ηd)·ln(e/(ηd))`.
pub fn clean_upper_bound(eta: Budget, d: usize) -> f64 {
    upper_bound(eta, d) * 32.0 / 36.0
}

/// Five constant bias vectors `(v, …, v)` for `v ∈ {−1/2, −1/4, 0, 1/4, 1/2}`.
pub fn default_upper_grid(d: usize) -> Result<Vec<BiasVector>> {
    [-0.5, -0.25, 0.0, 0.25, 0.5].iter().map(|&v| BiasVector::uniform(d, v)).collect()
}

#[derive(Debug, Clone)]
pub struct UpperBoundReport {
    pub cells: Vec<ExcessEstimate>,
    pub bound: f64,
    pub clean_bound: f64,
    pub max_ci_high: f64,
    pub max_mean: f64,
    /// Every cell's `ci_high` is at most `bound`.
    pub pass: bool,
}

/// Runs the subsample-cover learner on the full class over `d` points
/// against `adversary`, once per bias vector in `grid`.
pub fn upper_bound_experiment(
    eta: Budget,
    d: usize,
    n: usize,
    adversary: &dyn Adversary,
    trials: usize,
    source: &RandomSource,
    grid: &[BiasVector],
) -> Result<UpperBoundReport> {
    if grid.is_empty() {
        return Err(Error::Empty("bias grid"));
    }
    let cfg = VcLearnerConfig::new(eta, d)?;
    cfg.check_size(n)?;
    let learner = VcLearner::new(HypothesisClass::full(d)?, cfg);
    let mut cells = Vec::with_capacity(grid.len());
    for (i, u) in grid.iter().enumerate() {
        if u.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: u.dim() });
        }
        let dist = ProductBiasDistribution::new(u.clone());
        let mut est = mc_adversarial_loss(&learner, adversary, &dist, n, eta, trials, &source.child(i as u64))?;
        est.metadata.experiment = "upper".into();
        cells.push(est);
    }
    let bound = upper_bound(eta, d);
    let max_ci_high = cells.iter().map(|c| c.ci_high).fold(f64::NEG_INFINITY, f64::max);
    let max_mean = cells.iter().map(|c| c.mean).fold(f64::NEG_INFINITY, f64::max);
    Ok(UpperBoundReport {
        pass: max_ci_high <= bound,
        cells,
        bound,
        clean_bound: clean_upper_bound(eta, d),
        max_ci_high,
        max_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{GreedyAttack, NoAttack};

    #[test]
    fn bound_values() {
        // 36 · (1/8) · ln(64e) = 4.5 · (1 + 6 ln 2)
        let b = upper_bound(Budget::new(1, 64).unwrap(), 1);
        assert!((b - 4.5 * (1.0 + 6.0 * 2f64.ln())).abs() < 1e-12);
        assert!((b - 23.21).abs() < 0.01);
        let c = clean_upper_bound(Budget::new(1, 64).unwrap(), 1);
        assert!((c - 4.0 * (1.0 + 6.0 * 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let src = RandomSource::from_seed(1);
        let grid = default_upper_grid(1).unwrap();
        assert!(upper_bound_experiment(Budget::new(1, 4).unwrap(), 1, 64, &NoAttack, 10, &src, &grid).is_err());
        assert!(upper_bound_experiment(Budget::new(1, 64).unwrap(), 1, 32, &NoAttack, 10, &src, &grid).is_err());
        assert!(upper_bound_experiment(Budget::new(1, 64).unwrap(), 1, 64, &NoAttack, 10, &src, &[]).is_err());
    }

    #[test]
    fn small_run_passes_both_bounds() {
        let eta = Budget::new(1, 64).unwrap();
        let grid = default_upper_grid(1).unwrap();
        let src = RandomSource::from_seed(5);
        let clean = upper_bound_experiment(eta, 1, 256, &NoAttack, 300, &src, &grid).unwrap();
        assert!(clean.pass && clean.max_ci_high <= clean.clean_bound);
        let attacked = upper_bound_experiment(eta, 1, 256, &GreedyAttack::new(1), 300, &src, &grid).unwrap();
        assert!(attacked.pass);
        assert_eq!(attacked.cells.len(), 5);
        assert!(attacked.cells.iter().all(|c| c.metadata.experiment == "upper"));
    }
}
