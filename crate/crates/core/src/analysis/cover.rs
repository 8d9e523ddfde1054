//! Cover radius of a subclass under a point marginal.

use crate::domain::{Hypothesis, HypothesisClass};
use crate::error::{Error, Result};

/// Uniform distribution over `n` points.
pub fn uniform_marginal(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// `sup_{h ∈ H} min_{h' ∈ Hsub} Pr_x[h(x) ≠ h'(x)]`.
pub fn cover_radius(class: &HypothesisClass, sub: &[Hypothesis], marginal: &[f64]) -> Result<f64> {
    if sub.is_empty() {
        return Err(Error::Empty("cover subset"));
    }
    let n = class.domain_size();
    if marginal.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: marginal.len() });
    }
    if let Some(g) = sub.iter().find(|g| g.domain_size() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: g.domain_size() });
    }
    if marginal.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidValue("marginal has a negative or NaN mass".into()));
    }
    let mass = |h: &Hypothesis, g: &Hypothesis| -> f64 {
        h.values()
            .iter()
            .zip(g.values())
            .zip(marginal)
            .filter(|((a, b), _)| a != b)
            .map(|(_, p)| p)
            .sum()
    };
    Ok(class
        .iter()
        .map(|h| sub.iter().map(|g| mass(h, g)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::restrict_dedupe;
    use crate::domain::{Label, Point};
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        let full = HypothesisClass::full(3).unwrap();
        assert_eq!(cover_radius(&full, full.hypotheses(), &uniform_marginal(3)).unwrap(), 0.0);
        let consts = HypothesisClass::constants(3).unwrap();
        let plus = [Hypothesis::constant(3, Label::Plus)];
        assert!((cover_radius(&consts, &plus, &uniform_marginal(3)).unwrap() - 1.0).abs() < 1e-15);
        assert!(cover_radius(&consts, &[], &uniform_marginal(3)).is_err());
    }

    #[test]
    fn matches_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let mut masks: Vec<u64> = (0..rng.gen_range(2..10)).map(|_| rng.gen_range(0..16)).collect();
            masks.sort_unstable();
            masks.dedup();
            let class = HypothesisClass::new(4, masks.iter().map(|&m| Hypothesis::from_mask(4, m)).collect()).unwrap();
            let sub: Vec<Hypothesis> = class.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if sub.is_empty() {
                continue;
            }
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let marginal: Vec<f64> = w.iter().map(|v| v / total).collect();
            let mut sup = 0.0f64;
            for i in 0..class.len() {
                let mut inf = f64::INFINITY;
                for g in &sub {
                    let mut m = 0.0;
                    for x in 0..4 {
                        if class.get(i).values()[x] != g.values()[x] {
                            m += marginal[x];
                        }
                    }
                    inf = inf.min(m);
                }
                sup = sup.max(inf);
            }
            assert!((cover_radius(&class, &sub, &marginal).unwrap() - sup).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_points_shrink_radius() {
        let class = HypothesisClass::full(5).unwrap();
        let marginal = uniform_marginal(5);
        let mut prev = f64::INFINITY;
        for k in 1..=5 {
            let pts: Vec<Point> = (0..k).map(Point).collect();
            let reps = restrict_dedupe(&class, &pts).unwrap();
            let r = cover_radius(&class, reps.representatives(), &marginal).unwrap();
            assert!(r <= prev + 1e-15);
            prev = r;
        }
        assert_eq!(prev, 0.0);
    }
}
