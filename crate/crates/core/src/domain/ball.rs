use super::{Example, Sample};
use crate::error::{Error, Result};

/// Default limit on the number of samples [`ball_enumerate`] will materialize.
pub const DEFAULT_BALL_CAP: u128 = 10_000_000;

/// Exact number of samples within `max_changes` rewrites of `sample` over `alphabet`.
pub fn ball_size(sample: &Sample, max_changes: usize, alphabet: &[Example]) -> u128 {
    // Elementary symmetric sums of the per-position replacement counts.
    let mut e = vec![0u128; max_changes + 1];
    e[0] = 1;
    for item in sample.iter() {
        let c = alphabet.iter().filter(|a| *a != item).count() as u128;
        for r in (1..=max_changes).rev() {
            e[r] = e[r].saturating_add(e[r - 1].saturating_mul(c));
        }
    }
    e.into_iter().fold(0u128, |acc, v| acc.saturating_add(v))
}

/// Every sample that differs from `sample` in at most `max_changes` positions,
/// with each changed position rewritten to an `alphabet` member.
///
/// Output order is canonical: by number of changed positions, then positions
/// in lexicographic order, then replacements in alphabet order. `sample`
/// itself comes first. No sample appears twice.
pub fn ball_enumerate(
    sample: &Sample,
    max_changes: usize,
    alphabet: &[Example],
    cap: u128,
) -> Result<Vec<Sample>> {
    let max_changes = max_changes.min(sample.len());
    let size = ball_size(sample, max_changes, alphabet);
    if size > cap {
        return Err(Error::EnumerationTooLarge { requested: size, cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut positions = Vec::with_capacity(max_changes);
    for r in 0..=max_changes {
        combos(sample.len(), r, 0, &mut positions, &mut |pos| {
            let mut current = sample.clone();
            rewrite(sample, alphabet, pos, 0, &mut current, &mut out);
        });
    }
    debug_assert_eq!(out.len() as u128, size);
    Ok(out)
}

fn combos(n: usize, r: usize, start: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if acc.len() == r {
        f(acc);
        return;
    }
    let remaining = r - acc.len();
    for i in start..=n - remaining {
        acc.push(i);
        combos(n, r, i + 1, acc, f);
        acc.pop();
    }
}

fn rewrite(
    original: &Sample,
    alphabet: &[Example],
    positions: &[usize],
    depth: usize,
    current: &mut Sample,
    out: &mut Vec<Sample>,
) {
    if depth == positions.len() {
        out.push(current.clone());
        return;
    }
    let i = positions[depth];
    for &a in alphabet {
        if a == original.get(i) {
            continue;
        }
        current.replace(i, a);
        rewrite(original, alphabet, positions, depth + 1, current, out);
    }
    current.replace(i, original.get(i));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{full_alphabet, hamming_count, Label};
    use std::collections::HashSet;

    fn s(items: &[(usize, Label)]) -> Sample {
        Sample::new(items.iter().map(|&(p, y)| Example::new(p, y)).collect()).unwrap()
    }

    /// Independent generator: every sequence over the alphabet, filtered by distance.
    fn brute_ball(sample: &Sample, max_changes: usize, alphabet: &[Example]) -> HashSet<Sample> {
        let mut all: Vec<Vec<Example>> = vec![vec![]];
        for _ in 0..sample.len() {
            all = all
                .into_iter()
                .flat_map(|prefix| {
                    alphabet.iter().map(move |&a| {
                        let mut p = prefix.clone();
                        p.push(a);
                        p
                    })
                })
                .collect();
        }
        all.into_iter()
            .map(|v| Sample::new(v).unwrap())
            .filter(|c| hamming_count(sample, c).unwrap() <= max_changes)
            .collect()
    }

    #[test]
    fn zero_budget_is_singleton() {
        let x = s(&[(0, Label::Plus), (0, Label::Minus)]);
        let ball = ball_enumerate(&x, 0, &full_alphabet(1), DEFAULT_BALL_CAP).unwrap();
        assert_eq!(ball, vec![x]);
    }

    #[test]
    fn two_examples_one_point() {
        let x = s(&[(0, Label::Plus), (0, Label::Minus)]);
        let ball = ball_enumerate(&x, 1, &full_alphabet(1), DEFAULT_BALL_CAP).unwrap();
        assert_eq!(ball.len(), 3);
        assert_eq!(ball[0], x);
    }

    #[test]
    fn counting_formula_alphabet_four() {
        let x = s(&[(0, Label::Plus), (1, Label::Minus), (1, Label::Plus)]);
        let alphabet = full_alphabet(2);
        let ball = ball_enumerate(&x, 1, &alphabet, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(ball.len(), 1 + 3 * 3);
        assert_eq!(ball_size(&x, 1, &alphabet), 10);
    }

    #[test]
    fn matches_independent_generator() {
        let alphabet = full_alphabet(2);
        let cases = [
            s(&[(0, Label::Plus)]),
            s(&[(0, Label::Plus), (1, Label::Minus)]),
            s(&[(1, Label::Plus), (1, Label::Plus), (0, Label::Minus)]),
            s(&[(0, Label::Plus), (1, Label::Minus), (0, Label::Minus), (1, Label::Plus)]),
        ];
        for x in &cases {
            for r in 0..=x.len() {
                let ball = ball_enumerate(x, r, &alphabet, DEFAULT_BALL_CAP).unwrap();
                let set: HashSet<Sample> = ball.iter().cloned().collect();
                assert_eq!(set.len(), ball.len(), "duplicates");
                assert!(ball.iter().all(|c| hamming_count(x, c).unwrap() <= r));
                assert_eq!(set, brute_ball(x, r, &alphabet));
            }
        }
    }

    #[test]
    fn alphabet_not_containing_entries() {
        // Entry at point 2 is not in the alphabet; every alphabet member is a valid rewrite.
        let x = s(&[(2, Label::Plus), (0, Label::Plus)]);
        let alphabet = full_alphabet(1);
        let ball = ball_enumerate(&x, 1, &alphabet, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(ball.len(), 1 + 2 + 1);
    }

    #[test]
    fn cap_is_enforced() {
        let x = s(&[(0, Label::Plus); 10]);
        let err = ball_enumerate(&x, 3, &full_alphabet(4), 100).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }
}
