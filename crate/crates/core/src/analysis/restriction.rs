//! Restriction classes, the Sauer–Shelah bound and brute-force VC dimension.

use std::collections::HashMap;

use crate::domain::{Hypothesis, HypothesisClass, Label, Point};
use crate::error::{Error, Result};

/// Largest domain [`vc_dimension`] will search.
pub const VC_MAX_DOMAIN: usize = 20;

/// One representative per pattern of the parent class on a point set.
#[derive(Debug, Clone)]
pub struct RestrictionClass {
    points: Vec<Point>,
    indices: Vec<usize>,
    class: HypothesisClass,
}

impl RestrictionClass {
    /// Distinct points of `X`, in first-occurrence order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Parent indices of the representatives, increasing.
    pub fn representative_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn representatives(&self) -> &[Hypothesis] {
        self.class.hypotheses()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.class
    }

    pub fn into_class(self) -> HypothesisClass {
        self.class
    }
}

/// Keeps the lowest-index hypothesis of each `~_X` equivalence class.
pub fn restrict_dedupe(class: &HypothesisClass, points: &[Point]) -> Result<RestrictionClass> {
    if points.is_empty() {
        return Err(Error::Empty("restriction point set"));
    }
    let mut distinct: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        class.check_point(p)?;
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    let mut seen: HashMap<Vec<Label>, ()> = HashMap::new();
    let mut indices = Vec::new();
    for (j, h) in class.iter().enumerate() {
        let pattern: Vec<Label> = distinct.iter().map(|&p| h.at(p)).collect();
        if seen.insert(pattern, ()).is_none() {
            indices.push(j);
        }
    }
    let reps = indices.iter().map(|&j| class.get(j).clone()).collect();
    let restricted = HypothesisClass::new(class.domain_size(), reps)?;
    Ok(RestrictionClass { points: distinct, indices, class: restricted })
}

/// `Σ_{i=0}^{d} C(n, i)`, saturating at `u128::MAX`.
pub fn sauer_bound(n: usize, d: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=d.min(n) {
        if i > 0 {
            c = c.saturating_mul((n - i + 1) as u128) / i as u128;
        }
        total = total.saturating_add(c);
    }
    total
}

/// `(e·n/d)^d`, valid as an upper bound on [`sauer_bound`] for `n ≥ d ≥ 1`.
pub fn sauer_exp_bound(n: usize, d: usize) -> Result<f64> {
    if d == 0 || n < d {
        return Err(Error::Precondition(format!("(en/d)^d needs n >= d >= 1, got n = {n}, d = {d}")));
    }
    Ok((std::f64::consts::E * n as f64 / d as f64).powi(d as i32))
}

/// Exact VC dimension by shattering search, smallest sets first.
pub fn vc_dimension(class: &HypothesisClass) -> Result<usize> {
    let n = class.domain_size();
    if n > VC_MAX_DOMAIN {
        return Err(Error::ScopeExceeded(format!("domain size {n} exceeds {VC_MAX_DOMAIN}")));
    }
    let masks: Vec<u32> = class
        .iter()
        .map(|h| {
            h.values()
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &y)| if y == Label::Plus { acc | 1 << i } else { acc })
        })
        .collect();
    let mut best = 0;
    let mut buf: Vec<u32> = Vec::with_capacity(masks.len());
    for size in 1..=n {
        if (masks.len() as u128) < 1u128 << size {
            break;
        }
        let mut found = false;
        let mut subset: u32 = (1u32 << size) - 1;
        let limit: u32 = 1u32 << n;
        while subset < limit {
            buf.clear();
            buf.extend(masks.iter().map(|m| m & subset));
            buf.sort_unstable();
            buf.dedup();
            if buf.len() == 1usize << size {
                found = true;
                break;
            }
            // Gosper's hack: next subset with the same popcount.
            let c = subset & subset.wrapping_neg();
            let r = subset + c;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
        if !found {
            break;
        }
        best = size;
    }
    Ok(best)
}
