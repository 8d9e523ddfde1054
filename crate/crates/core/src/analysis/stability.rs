//! Prediction-stability certificates for the exponential mechanism.

use crate::domain::{ball_enumerate, hamming_count, Example, HypothesisClass, Point, Sample};
use crate::error::{Error, Result};
use crate::learners::{exp_log_weights, predict_prob, ExpMechanismConfig, Learner};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `ln Pr_S(h) − ln Pr_{S'}(h)` per hypothesis, in class order.
    pub log_gaps: Vec<f64>,
    pub max_gap: f64,
    /// `2tη`.
    pub ratio_bound: f64,
    pub ratio_holds: bool,
    /// `|p_plus(S,x) − p_plus(S',x)|` per queried point.
    pub flip_probs: Vec<(Point, f64)>,
    /// `4tη`.
    pub flip_bound: f64,
    pub flip_holds: bool,
}

/// Checks the log-ratio bound `|ln Pr_S(h)/Pr_{S'}(h)| ≤ 2tη` and the
/// coupled flip bound `|p_S − p_{S'}| ≤ 4tη` for two neighbouring samples.
pub fn stability_certificate(
    class: &HypothesisClass,
    s: &Sample,
    s_prime: &Sample,
    cfg: &ExpMechanismConfig,
    queries: &[Point],
) -> Result<StabilityReport> {
    let changed = hamming_count(s, s_prime)?;
    if changed as f64 > cfg.eta() * s.len() as f64 + 1e-9 {
        return Err(Error::Precondition(format!(
            "samples differ in {changed} of {} positions, more than eta = {}",
            s.len(),
            cfg.eta()
        )));
    }
    let t = cfg.temperature(class.len());
    let a = exp_log_weights(&class.losses(s)?, t);
    let b = exp_log_weights(&class.losses(s_prime)?, t);
    let log_gaps: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let max_gap = log_gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let ratio_bound = 2.0 * t * cfg.eta();
    let mut flip_probs = Vec::with_capacity(queries.len());
    for &x in queries {
        let p = predict_prob(class, s, x, cfg)?.p_plus;
        let q = predict_prob(class, s_prime, x, cfg)?.p_plus;
        flip_probs.push((x, (p - q).abs()));
    }
    let flip_bound = 4.0 * t * cfg.eta();
    Ok(StabilityReport {
        ratio_holds: max_gap <= ratio_bound + 1e-9,
        flip_holds: flip_probs.iter().all(|(_, f)| *f <= flip_bound + 1e-12),
        log_gaps,
        max_gap,
        ratio_bound,
        flip_probs,
        flip_bound,
    })
}

/// `max_{S' ∈ ball} |p_plus(S,x) − p_plus(S',x)|`: the worst-case flip
/// probability of the threshold-coupled version of `learner`.
pub fn exact_prediction_stability(
    learner: &dyn Learner,
    sample: &Sample,
    x: Point,
    max_changes: usize,
    alphabet: &[Example],
    cap: u128,
) -> Result<f64> {
    let exact = |s: &Sample| -> Result<f64> {
        learner.exact_plus(s, x)?.ok_or_else(|| {
            Error::Precondition(format!("learner {} has no exact prediction probability", learner.id()))
        })
    };
    let base = exact(sample)?;
    let mut worst = 0.0f64;
    for s in ball_enumerate(sample, max_changes, alphabet, cap)? {
        worst = worst.max((exact(&s)? - base).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{full_alphabet, Label, DEFAULT_BALL_CAP};
    use crate::learners::CoupledLearner;

    fn s(labels: &[Label]) -> Sample {
        Sample::new(labels.iter().map(|&y| Example::new(0, y)).collect()).unwrap()
    }

    #[test]
    fn identical_samples() {
        use Label::*;
        let class = HypothesisClass::constants(1).unwrap();
        let cfg = ExpMechanismConfig::new(0.25).unwrap();
        let a = s(&[Plus, Minus, Plus, Plus]);
        let r = stability_certificate(&class, &a, &a, &cfg, &[Point(0)]).unwrap();
        assert!(r.log_gaps.iter().all(|g| *g == 0.0));
        assert!(r.ratio_holds && r.flip_holds);
    }

    #[test]
    fn single_flip_gap() {
        use Label::*;
        let class = HypothesisClass::constants(1).unwrap();
        let cfg = ExpMechanismConfig::new(0.25).unwrap();
        let a = s(&[Plus, Minus, Plus, Plus]);
        let b = s(&[Minus, Minus, Plus, Plus]);
        let r = stability_certificate(&class, &a, &b, &cfg, &[Point(0)]).unwrap();
        // Losses of (+1, −1) move from (1/4, 3/4) to (1/2, 1/2).
        let t = cfg.temperature(2);
        let w = |l: [f64; 2]| {
            let z = (-t * l[0]).exp() + (-t * l[1]).exp();
            [(-t * l[0]).exp() / z, (-t * l[1]).exp() / z]
        };
        let (pa, pb) = (w([0.25, 0.75]), w([0.5, 0.5]));
        assert!((r.log_gaps[0] - (pa[0] / pb[0]).ln()).abs() < 1e-12);
        assert!(r.max_gap <= 2.0 * t * 0.25 + 1e-12);
        assert!((r.flip_probs[0].1 - (pa[0] - pb[0]).abs()).abs() < 1e-12);
        let far = s(&[Minus, Minus, Minus, Plus]);
        assert!(stability_certificate(&class, &a, &far, &cfg, &[]).is_err());
    }

    #[test]
    fn worst_case_stability_within_bound() {
        use Label::*;
        let class = HypothesisClass::full(2).unwrap();
        let cfg = ExpMechanismConfig::new(0.25).unwrap();
        let learner = CoupledLearner::new(class.clone(), cfg);
        let a = Sample::new(vec![Example::new(0, Plus), Example::new(1, Minus), Example::new(0, Plus), Example::new(1, Plus)]).unwrap();
        let lam = exact_prediction_stability(&learner, &a, Point(0), 1, &full_alphabet(2), DEFAULT_BALL_CAP).unwrap();
        assert!(lam > 0.0 && lam <= 4.0 * cfg.temperature(4) * 0.25);
    }
}
