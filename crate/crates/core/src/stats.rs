//! Summary statistics with order-independent summation.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Pairwise (cascade) summation over the slice in its given order.
///
/// The tree shape depends only on the length, so a fixed input order gives
/// bit-identical sums regardless of how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error of the mean (zero for a single value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `mean ± z·se`.
pub fn normal_ci(mean: f64, se: f64, z: f64) -> (f64, f64) {
    (mean - z * se, mean + z * se)
}

/// Wilson score interval for a proportion `p` observed over `n` trials.
pub fn wilson_ci(p: f64, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).max(0.0).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Interval for the mean of values in `[0, 1]`: Wilson when fewer than ten
/// expected successes or failures, normal otherwise. Always contains the mean.
pub fn bounded_ci(mean: f64, se: f64, trials: usize) -> (f64, f64) {
    let t = trials as f64;
    let (lo, hi) = if mean * t < 10.0 || (1.0 - mean) * t < 10.0 {
        wilson_ci(mean.clamp(0.0, 1.0), trials, Z95)
    } else {
        normal_ci(mean, se, Z95)
    };
    (lo.min(mean), hi.max(mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_exact_values() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn mean_and_se_reference() {
        // Values 1..=4: mean 2.5, sample variance 5/3.
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_se(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn wilson_reference() {
        // p = 0, n = 100, z = 1.96: upper limit z²/(n + z²) ≈ 0.0370.
        let (lo, hi) = wilson_ci(0.0, 100, Z95);
        assert!(lo.abs() < 1e-15);
        assert!((hi - Z95 * Z95 / (100.0 + Z95 * Z95)).abs() < 1e-12);
        let (lo, hi) = bounded_ci(0.5, 0.01, 10_000);
        assert!((lo - (0.5 - Z95 * 0.01)).abs() < 1e-15 && (hi - (0.5 + Z95 * 0.01)).abs() < 1e-15);
    }
}
