//! Binomial confidence intervals.

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

/// Wald half-width `z * sqrt(p (1 - p) / n)` at 99%.
pub fn wald_halfwidth99(failures: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = failures as f64 / trials as f64;
    Z99 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Wilson score interval at 99%, as `(low, high)`.
pub fn wilson99(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z99 * Z99;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
