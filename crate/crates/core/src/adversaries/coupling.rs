//! Maximal coupling of two `D_u` distributions.

use rand::Rng;

use crate::domain::{Example, ProductBiasDistribution};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

fn inverse_cdf(atoms: &[(Example, f64)], mut r: f64) -> Option<Example> {
    let mut last = None;
    for &(e, w) in atoms {
        if w <= 0.0 {
            continue;
        }
        if r < w {
            return Some(e);
        }
        r -= w;
        last = Some(e);
    }
    last
}

/// One draw `(z, z')` with `z ∼ D_u`, `z' ∼ D_{u'}` and `Pr[z ≠ z'] = d(u, u')`.
///
/// A single uniform `U` drives both sides over the fixed atom order: below
/// the overlap mass both take the overlap quantile, above it each side takes
/// its own residual quantile. The residuals have disjoint supports.
pub fn maximal_coupling_draw(
    p: &ProductBiasDistribution,
    q: &ProductBiasDistribution,
    source: &RandomSource,
) -> Result<(Example, Example)> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), actual: q.dim() });
    }
    let pa = p.atoms();
    let qa = q.atoms();
    let overlap: Vec<(Example, f64)> = pa.iter().zip(&qa).map(|(a, b)| (a.0, a.1.min(b.1))).collect();
    let common: f64 = overlap.iter().map(|(_, w)| w).sum();
    let u: f64 = source.rng().gen();
    if u < common {
        let z = inverse_cdf(&overlap, u).expect("positive overlap mass");
        return Ok((z, z));
    }
    let v = u - common;
    let rp: Vec<(Example, f64)> = pa.iter().zip(&overlap).map(|(a, o)| (a.0, a.1 - o.1)).collect();
    let rq: Vec<(Example, f64)> = qa.iter().zip(&overlap).map(|(b, o)| (b.0, b.1 - o.1)).collect();
    match (inverse_cdf(&rp, v), inverse_cdf(&rq, v)) {
        (Some(a), Some(b)) => Ok((a, b)),
        // Rounding left no residual mass: the distributions coincide.
        _ => {
            let z = inverse_cdf(&overlap, u.min(common) * (1.0 - f64::EPSILON)).expect("positive overlap mass");
            Ok((z, z))
        }
    }
}
