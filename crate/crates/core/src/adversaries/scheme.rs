//! The grid poisoning scheme, its hard bias distribution and the d-dimensional lift.
//!
//! Biases are handled as integer multiples ("ticks") of the effective step
//! `η`, so grid membership is exact. A tick `k` maps to the float `k·num/den`
//! through one fixed expression, giving bit-identical values everywhere.

use rand::Rng;

use crate::analysis::PoisoningScheme;
use crate::budget::Budget;
use crate::domain::{BiasVector, Label};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// The largest step the construction uses; larger budgets are capped here.
const CAP: (u64, u64) = (1, 16);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoisoningScheme1D {
    requested: Budget,
    eta: Budget,
    m: u64,
}

impl PoisoningScheme1D {
    /// The budget asked for.
    pub fn requested_eta(&self) -> Budget {
        self.requested
    }

    /// The step actually used, `min(η, 1/16)`.
    pub fn eta(&self) -> Budget {
        self.eta
    }

    pub fn capped(&self) -> bool {
        self.eta != self.requested
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Endpoint tick `2m + 1`.
    pub fn endpoint_tick(&self) -> i64 {
        2 * self.m as i64 + 1
    }

    pub fn tick_value(&self, k: i64) -> f64 {
        (k as f64 * self.eta.numer() as f64) / self.eta.denom() as f64
    }

    /// The tick of `u`, if `u` is a multiple of the step.
    pub fn tick_of(&self, u: f64) -> Option<i64> {
        let k = (u * self.eta.denom() as f64 / self.eta.numer() as f64).round() as i64;
        (self.tick_value(k) == u).then_some(k)
    }

    pub fn on_grid(&self, k: i64) -> bool {
        k % 2 == 0 && k.unsigned_abs() <= 2 * self.m
    }

    /// `ξ_{−1}(2iη) = (2i+1)η`, `ξ_{+1}(2iη) = (2i−1)η`, identity elsewhere.
    pub fn xi_tick(&self, y: Label, k: i64) -> i64 {
        if self.on_grid(k) {
            match y {
                Label::Minus => k + 1,
                Label::Plus => k - 1,
            }
        } else {
            k
        }
    }

    pub fn xi(&self, y: Label, u: f64) -> f64 {
        match self.tick_of(u) {
            Some(k) if self.on_grid(k) => self.tick_value(self.xi_tick(y, k)),
            _ => u,
        }
    }
}

impl PoisoningScheme for PoisoningScheme1D {
    fn id(&self) -> String {
        format!("grid-1d(eta={},m={})", self.eta, self.m)
    }

    fn dim(&self) -> usize {
        1
    }

    fn apply(&self, i: usize, y: Label, u: &BiasVector) -> Result<BiasVector> {
        if i != 0 || u.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, actual: u.dim().max(i + 1) });
        }
        BiasVector::new(vec![self.xi(y, u.get(0))])
    }
}

/// Grid atoms `2iη` (weight `1/(2(2m+1))` each) and endpoints `±(2m+1)η` (weight 1/4 each).
#[derive(Debug, Clone, PartialEq)]
pub struct HardBiasDistribution {
    scheme: PoisoningScheme1D,
    atoms: Vec<(i64, f64)>,
}

impl HardBiasDistribution {
    fn new(scheme: PoisoningScheme1D) -> Self {
        let m = scheme.m as i64;
        let w = 1.0 / (2.0 * (2 * m + 1) as f64);
        let e = scheme.endpoint_tick();
        let mut atoms = vec![(-e, 0.25)];
        atoms.extend((-m..=m).map(|i| (2 * i, w)));
        atoms.push((e, 0.25));
        Self { scheme, atoms }
    }

    /// `(tick, weight)` pairs in increasing tick order.
    pub fn atoms(&self) -> &[(i64, f64)] {
        &self.atoms
    }

    /// `(bias, weight)` pairs in increasing order.
    pub fn atom_values(&self) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|&(k, w)| (self.scheme.tick_value(k), w)).collect()
    }

    pub fn scheme(&self) -> &PoisoningScheme1D {
        &self.scheme
    }

    pub fn draw_tick<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for &(k, w) in &self.atoms {
            acc += w;
            if r < acc {
                return k;
            }
        }
        self.atoms.last().expect("nonempty support").0
    }

    /// `d` independent ticks from one stream.
    pub fn draw_ticks(&self, d: usize, source: &RandomSource) -> Vec<i64> {
        let mut rng = source.rng();
        (0..d).map(|_| self.draw_tick(&mut rng)).collect()
    }
}

/// Builds the scheme and hard distribution at `min(η, 1/16)` with the
/// largest `m` such that `√η/2 ≤ (2m+1)η ≤ √η`.
pub fn build_scheme_1d(eta: Budget) -> Result<(PoisoningScheme1D, HardBiasDistribution)> {
    let cap = Budget::new(CAP.0, CAP.1)?;
    let step = if eta.le(&cap) { eta } else { cap };
    let (num, den) = (u128::from(step.numer()), u128::from(step.denom()));
    // Largest s with s²·num ≤ den, then the largest odd value not above it.
    let mut s = ((den as f64 / num as f64).sqrt()) as u128;
    while (s + 1) * (s + 1) * num <= den {
        s += 1;
    }
    while s > 0 && s * s * num > den {
        s -= 1;
    }
    let odd = if s.is_multiple_of(2) { s.saturating_sub(1) } else { s };
    if odd == 0 || 4 * odd * odd * num < den {
        return Err(Error::Construction(format!("no grid half-width fits eta = {step}")));
    }
    let scheme = PoisoningScheme1D { requested: eta, eta: step, m: ((odd - 1) / 2) as u64 };
    Ok((scheme, HardBiasDistribution::new(scheme)))
}

/// Coordinate-wise application of a 1-D scheme built at budget `d·η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoisoningSchemeD {
    inner: PoisoningScheme1D,
    d: usize,
}

impl PoisoningSchemeD {
    pub fn inner(&self) -> &PoisoningScheme1D {
        &self.inner
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn apply_ticks(&self, i: usize, y: Label, ticks: &[i64]) -> Vec<i64> {
        let mut out = ticks.to_vec();
        out[i] = self.inner.xi_tick(y, ticks[i]);
        out
    }

    pub fn bias_from_ticks(&self, ticks: &[i64]) -> Result<BiasVector> {
        BiasVector::new(ticks.iter().map(|&k| self.inner.tick_value(k)).collect())
    }
}

/// Lifts `inner` to `d` coordinates; the lift has budget `inner / d`.
pub fn lift_scheme(inner: PoisoningScheme1D, d: usize) -> Result<PoisoningSchemeD> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    Ok(PoisoningSchemeD { inner, d })
}

/// The lifted scheme with budget `η` in `d` dimensions; requires `d·η < 1`.
pub fn build_scheme_d(eta: Budget, d: usize) -> Result<(PoisoningSchemeD, HardBiasDistribution)> {
    let inner_budget = eta
        .scaled(d as u64)
        .map_err(|_| Error::Precondition(format!("d·eta must be below 1, got d = {d}, eta = {eta}")))?;
    let (inner, hard) = build_scheme_1d(inner_budget)?;
    Ok((lift_scheme(inner, d)?, hard))
}

impl PoisoningScheme for PoisoningSchemeD {
    fn id(&self) -> String {
        format!("grid-lift(d={},eta={},m={})", self.d, self.inner.eta, self.inner.m)
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, i: usize, y: Label, u: &BiasVector) -> Result<BiasVector> {
        if u.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: u.dim() });
        }
        if i >= self.d {
            return Err(Error::DomainMismatch { index: i, domain_size: self.d });
        }
        u.with_coord(i, self.inner.xi(y, u.get(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::dist_tv;

    fn b(num: u64, den: u64) -> Budget {
        Budget::new(num, den).unwrap()
    }

    #[test]
    fn eta_one_64() {
        let (s, hard) = build_scheme_1d(b(1, 64)).unwrap();
        assert_eq!(s.m(), 3);
        assert!(!s.capped());
        let grid: Vec<f64> = hard.atom_values().iter().map(|(v, _)| *v).collect();
        assert_eq!(grid, vec![-7.0 / 64.0, -6.0 / 64.0, -4.0 / 64.0, -2.0 / 64.0, 0.0, 2.0 / 64.0, 4.0 / 64.0, 6.0 / 64.0, 7.0 / 64.0]);
        assert_eq!(s.xi(Label::Minus, 0.0), 1.0 / 64.0);
        assert_eq!(s.xi(Label::Plus, 2.0 / 64.0), 1.0 / 64.0);
        assert_eq!(s.xi(Label::Plus, 7.0 / 64.0), 7.0 / 64.0);
        assert_eq!(s.xi(Label::Minus, 0.3), 0.3);
    }

    #[test]
    fn bracket_holds_over_many_budgets() {
        for den in 16..2000u64 {
            let (s, hard) = build_scheme_1d(b(1, den)).unwrap();
            let eta = 1.0 / den as f64;
            let t = (2 * s.m() + 1) as f64 * eta;
            assert!(t <= eta.sqrt() + 1e-15 && t >= eta.sqrt() / 2.0 - 1e-15, "{den}");
            // No larger m satisfies the upper inequality.
            assert!((2 * s.m() + 3) as f64 * eta > eta.sqrt() - 1e-15);
            let total: f64 = hard.atoms().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (v, _) in hard.atom_values() {
                assert!(v.abs() <= eta.sqrt() + 1e-15);
            }
            let mut worst = 0.0f64;
            for &(k, _) in hard.atoms() {
                for y in Label::BOTH {
                    let u = s.tick_value(k);
                    worst = worst.max((s.xi(y, u) - u).abs());
                }
            }
            assert!((worst - eta).abs() < 1e-15, "{den}");
        }
    }

    #[test]
    fn large_budgets_are_capped() {
        let (s, _) = build_scheme_1d(b(1, 4)).unwrap();
        assert!(s.capped());
        assert_eq!(s.eta(), b(1, 16));
        assert_eq!(s.m(), 1);
    }

    #[test]
    fn lift_examples() {
        let eta = b(1, 128);
        let (lifted, hard) = build_scheme_d(eta, 2).unwrap();
        let zero = BiasVector::new(vec![0.0, 0.0]).unwrap();
        let out = lifted.apply(0, Label::Minus, &zero).unwrap();
        assert_eq!(out.coords(), &[1.0 / 64.0, 0.0]);
        assert!((dist_tv(&zero, &out).unwrap() - 1.0 / 128.0).abs() < 1e-15);
        let off = BiasVector::new(vec![0.3, 0.0]).unwrap();
        assert_eq!(lifted.apply(0, Label::Plus, &off).unwrap(), off);
        for &(a, _) in hard.atoms() {
            for &(c, _) in hard.atoms() {
                let u = lifted.bias_from_ticks(&[a, c]).unwrap();
                for i in 0..2 {
                    for y in Label::BOTH {
                        let v = lifted.apply(i, y, &u).unwrap();
                        assert!(dist_tv(&u, &v).unwrap() <= 1.0 / 128.0 + 1e-15);
                        assert_eq!(v, lifted.bias_from_ticks(&lifted.apply_ticks(i, y, &[a, c])).unwrap());
                        assert_eq!(v.get(1 - i), u.get(1 - i));
                    }
                }
            }
        }
        assert!(build_scheme_d(b(1, 2), 2).is_err());
        let (one, _) = build_scheme_d(b(1, 64), 1).unwrap();
        let (inner, _) = build_scheme_1d(b(1, 64)).unwrap();
        let u = BiasVector::new(vec![4.0 / 64.0]).unwrap();
        for y in Label::BOTH {
            assert_eq!(one.apply(0, y, &u).unwrap(), inner.apply(0, y, &u).unwrap());
        }
    }
}
