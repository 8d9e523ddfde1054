//! Sample-space attacks.

use super::AttackBudget;
use crate::domain::{ball_enumerate, Example, Point, Sample};
use crate::error::Result;
use crate::learners::error_from_plus;

/// The first sample in canonical ball order that maximizes the error
/// probability `(1 − y(2p − 1))/2` at the target.
pub fn brute_force_attack(
    oracle: &dyn Fn(&Sample, Point) -> Result<f64>,
    sample: &Sample,
    target: Example,
    budget: &AttackBudget,
    alphabet: &[Example],
    cap: u128,
) -> Result<Sample> {
    let ball = ball_enumerate(sample, budget.max_corruptions(), alphabet, cap)?;
    let mut best: Option<(f64, usize)> = None;
    for (j, s) in ball.iter().enumerate() {
        let err = error_from_plus(oracle(s, target.point)?, target.label);
        if best.is_none_or(|(b, _)| err > b) {
            best = Some((err, j));
        }
    }
    let (_, j) = best.expect("ball contains the sample itself");
    Ok(ball.into_iter().nth(j).expect("index from enumeration"))
}

/// Rewrites examples to `(x, −y)`: first those equal to the target, then
/// any other example, each pass in index order.
///
/// Returns the sample unchanged if `(x, −y)` is not in the alphabet.
pub fn greedy_flip_attack(sample: &Sample, target: Example, budget: &AttackBudget, alphabet: &[Example]) -> Sample {
    let poison = Example { point: target.point, label: target.label.flip() };
    if !alphabet.contains(&poison) {
        return sample.clone();
    }
    let mut out = sample.clone();
    let mut left = budget.max_corruptions();
    let first = (0..sample.len()).filter(|&i| sample.get(i) == target);
    let second = (0..sample.len()).filter(|&i| sample.get(i) != target && sample.get(i) != poison);
    for i in first.chain(second) {
        if left == 0 {
            break;
        }
        out.replace(i, poison);
        left -= 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::domain::{full_alphabet, hamming_count, HypothesisClass, Label, DEFAULT_BALL_CAP};
    use crate::learners::{predict_prob, ExpMechanismConfig};
    use proptest::prelude::*;

    fn budget(num: u64, den: u64, n: usize) -> AttackBudget {
        AttackBudget::new(Budget::new(num, den).unwrap(), n)
    }

    fn exp_oracle(domain: usize, eta: f64) -> impl Fn(&Sample, Point) -> Result<f64> {
        let class = HypothesisClass::full(domain).unwrap();
        let cfg = ExpMechanismConfig::new(eta).unwrap();
        move |s: &Sample, x: Point| Ok(predict_prob(&class, s, x, &cfg)?.p_plus)
    }

    #[test]
    fn zero_budget_and_constant_predictor() {
        use Label::*;
        let s = Sample::new(vec![Example::new(0, Plus), Example::new(0, Minus), Example::new(0, Plus)]).unwrap();
        let target = Example::new(0, Plus);
        let b0 = budget(1, 4, 3);
        assert_eq!(b0.max_corruptions(), 0);
        let oracle = exp_oracle(1, 0.25);
        assert_eq!(brute_force_attack(&oracle, &s, target, &b0, &full_alphabet(1), DEFAULT_BALL_CAP).unwrap(), s);
        let constant = |_: &Sample, _: Point| -> Result<f64> { Ok(0.3) };
        assert_eq!(brute_force_attack(&constant, &s, target, &budget(2, 3, 3), &full_alphabet(1), DEFAULT_BALL_CAP).unwrap(), s);
        assert_eq!(greedy_flip_attack(&s, target, &b0, &full_alphabet(1)), s);
    }

    #[test]
    fn brute_force_flips_toward_minus() {
        use Label::*;
        let s = Sample::new(vec![Example::new(0, Plus), Example::new(0, Minus)]).unwrap();
        let oracle = |s: &Sample, x: Point| -> Result<f64> {
            Ok(predict_prob(&HypothesisClass::constants(1).unwrap(), s, x, &ExpMechanismConfig::new(0.5).unwrap())?.p_plus)
        };
        let out = brute_force_attack(&oracle, &s, Example::new(0, Plus), &budget(1, 2, 2), &full_alphabet(1), DEFAULT_BALL_CAP).unwrap();
        assert!(out.iter().all(|e| e.label == Minus));
    }

    #[test]
    fn greedy_examples() {
        use Label::*;
        let s = Sample::new(vec![Example::new(0, Plus), Example::new(1, Minus), Example::new(0, Plus), Example::new(1, Plus)]).unwrap();
        let out = greedy_flip_attack(&s, Example::new(0, Plus), &budget(1, 2, 4), &full_alphabet(2));
        assert_eq!(out.get(0), Example::new(0, Minus));
        assert_eq!(out.get(2), Example::new(0, Minus));
        assert_eq!(out.get(1), s.get(1));
        assert_eq!(out.get(3), s.get(3));
        let all_minus = Sample::new(vec![Example::new(0, Minus); 4]).unwrap();
        assert_eq!(greedy_flip_attack(&all_minus, Example::new(0, Plus), &budget(3, 4, 4), &full_alphabet(2)), all_minus);
        // Second pass reaches other points once the target's copies are used up.
        let out = greedy_flip_attack(&s, Example::new(0, Plus), &budget(3, 4, 4), &full_alphabet(2));
        assert_eq!(out.get(1), Example::new(0, Minus));
        assert_eq!(out.get(3), s.get(3));
    }

    fn arb_sample(n: usize, domain: usize) -> impl Strategy<Value = Sample> {
        proptest::collection::vec((0..domain, any::<bool>()), n)
            .prop_map(|v| Sample::new(v.into_iter().map(|(p, b)| Example::new(p, Label::from_bool(b))).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn attacks_stay_in_ball_and_brute_dominates(
            s in arb_sample(4, 2),
            x in 0usize..2,
            yb in any::<bool>(),
            num in 1u64..4,
        ) {
            let target = Example::new(x, Label::from_bool(yb));
            let b = budget(num, 4, 4);
            let alphabet = full_alphabet(2);
            let oracle = exp_oracle(2, num as f64 / 4.0);
            let g = greedy_flip_attack(&s, target, &b, &alphabet);
            let br = brute_force_attack(&oracle, &s, target, &b, &alphabet, DEFAULT_BALL_CAP).unwrap();
            prop_assert!(hamming_count(&s, &g).unwrap() <= b.max_corruptions());
            prop_assert!(hamming_count(&s, &br).unwrap() <= b.max_corruptions());
            let eg = error_from_plus(oracle(&g, target.point).unwrap(), target.label);
            let eb = error_from_plus(oracle(&br, target.point).unwrap(), target.label);
            prop_assert!(eb >= eg - 1e-15);
        }
    }
}
