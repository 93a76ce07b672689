//! Empirical distributions and the estimators used against theory.

pub mod ecdf;
pub mod fit;
pub mod variance;

pub use ecdf::{dkw_band, ks_distance, EmpiricalDistribution};
pub use fit::{tail_exponent_fit, ExponentFit};
pub use variance::{variance_scaling, VarianceScaling};

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Log-spaced grid of `k ≥ 2` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..k)
        .map(|j| (a + (b - a) * j as f64 / (k - 1) as f64).exp())
        .collect()
}
