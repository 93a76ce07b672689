//! Exact law of the time spent sliding along an axis.
//!
//! Entering an axis at distance `x`, the walk moves outward with
//! probability `1 − q(x+m)` at its m-th step there, `q(t) = 1/(2 t^α)`,
//! and leaves at the first failure. So `ρ` (steps until it is off the axis)
//! has `P(ρ > k+1) = ∏_{m=0}^{k} (1 − q(x+m))`, and `Z̄_ρ = x + ρ − 1`.
//!
//! Series are summed in log-space with compensated addition. Truncation is
//! certified with `−ln(1−q) ≥ q` and an integral comparison:
//! `Σ_{j>J} s_j ≤ s_J ∫_A^∞ exp(−c(t^{1−α} − A^{1−α})) dt`, `A = x+J+1`,
//! `c = 1/(2(1−α))`, and the integral is bounded in closed form.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Series stop once the certified remainder is below this fraction of the sum.
pub const RELATIVE_TARGET: f64 = 1e-14;
/// Hard cap on summed terms.
pub const MAX_TERMS: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    /// Partial sum (the remainder is not added).
    pub value: f64,
    /// Certified upper bound on the omitted remainder.
    pub remainder_bound: f64,
    pub terms: u64,
}

#[inline]
fn off_axis(t: f64, alpha: f64) -> f64 {
    0.5 * t.powf(-alpha)
}

/// `∏_{m=0}^{k} (1 − 1/(2(x+m)^α))`: the probability that the first `k+1`
/// axis steps from `(x, 0)` all move outward, i.e. `P(ρ > k+1)`.
pub fn rho_survival(x: u64, alpha: f64, k: u64) -> f64 {
    assert!(x >= 1, "axis coordinate must be at least 1");
    let mut log = CompensatedSum::new();
    for m in 0..=k {
        log.add((-off_axis((x + m) as f64, alpha)).ln_1p());
    }
    log.value().exp()
}

/// Asymptotic expansion `x + 2x^α − 3/2 − x^{−α}/6` of `E(Z̄_ρ)`.
pub fn rho_mean_asymptotic(x: f64, alpha: f64) -> f64 {
    x + 2.0 * x.powf(alpha) - 1.5 - x.powf(-alpha) / 6.0
}

/// Upper bound for `∫_A^∞ t^e exp(−c(t^{1−α} − A^{1−α})) dt`.
///
/// With `s = t^{1−α} − A^{1−α}` the integral is
/// `(1/(1−α)) ∫_0^∞ e^{−cs} (A^{1−α} + s)^p ds`, `p = (e+α)/(1−α)`, and
/// `(a+s)^p ≤ 2^{max(p−1,0)} (a^p + s^p)`.
fn tail_integral_bound(a: f64, alpha: f64, e: f64) -> f64 {
    let b = 1.0 - alpha;
    let c = 1.0 / (2.0 * b);
    let p = (e + alpha) / b;
    let spread = if p > 1.0 { (p - 1.0).exp2() } else { 1.0 };
    let near = a.powf(e + alpha) / c;
    let far = (ln_gamma(p + 1.0) - (p + 1.0) * c.ln()).exp();
    spread * (near + far) / b
}

/// Lower bound on `rho_survival(x, α, k)` used to certify divergence when
/// `α ≥ 1`, from `−ln(1−q) ≤ 2 ln2·q` on `[0, ½]`.
pub fn survival_lower_bound(x: u64, alpha: f64, k: u64) -> f64 {
    let xf = x as f64;
    let head = off_axis(xf, alpha);
    let integral = if (alpha - 1.0).abs() < 1e-15 {
        0.5 * ((xf + k as f64) / xf).ln()
    } else {
        0.5 * (xf.powf(1.0 - alpha) - (xf + k as f64).powf(1.0 - alpha)) / (alpha - 1.0)
    };
    (-2.0 * std::f64::consts::LN_2 * (head + integral)).exp()
}

fn divergence(x: u64, alpha: f64) -> Error {
    if alpha > 1.0 {
        let floor = survival_lower_bound(x, alpha, u64::MAX / 2);
        Error::Divergent(format!(
            "alpha = {alpha}: P(rho > k) stays above {floor:.6e} for every k, so E(rho) is infinite"
        ))
    } else {
        Error::Divergent(format!(
            "alpha = {alpha}: P(rho > k) >= C (x/(x+k))^ln2 with ln2 < 1, so E(rho) is infinite"
        ))
    }
}

/// Sum `Σ_{j≥0} Δ_j s_j` where `s_j = rho_survival(x, α, j)` and the weights
/// satisfy `0 ≤ Δ_j ≤ scale·(x+j+1)^e`.
fn weighted_series(
    x: u64,
    alpha: f64,
    what: &'static str,
    weight: impl Fn(f64) -> f64,
    scale: f64,
    e: f64,
) -> Result<SeriesValue> {
    if x == 0 {
        return Err(Error::Precondition("axis coordinate must be at least 1".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    if alpha >= 1.0 {
        return Err(divergence(x, alpha));
    }
    let xf = x as f64;
    // Beyond this point the integrand of the remainder bound is decreasing.
    let monotone_from = (2.0 * e).powf(1.0 / (1.0 - alpha));
    let mut log_s = CompensatedSum::new();
    let mut sum = CompensatedSum::new();
    let mut bound = f64::INFINITY;
    for j in 0..MAX_TERMS {
        let t = xf + j as f64;
        log_s.add((-off_axis(t, alpha)).ln_1p());
        let s = log_s.value().exp();
        sum.add(weight(t) * s);
        if s == 0.0 {
            return Ok(SeriesValue { value: sum.value(), remainder_bound: 0.0, terms: j + 1 });
        }
        let a = t + 1.0;
        if a > monotone_from && j % 8 == 0 {
            bound = scale * s * tail_integral_bound(a, alpha, e);
            if bound <= RELATIVE_TARGET * sum.value() {
                return Ok(SeriesValue { value: sum.value(), remainder_bound: bound, terms: j + 1 });
            }
        }
    }
    Err(Error::NonConvergent { what, terms: MAX_TERMS, bound })
}

/// Exact `E(Z̄_ρ) = x + Σ_{k≥0} rho_survival(x, α, k)` for an excursion
/// entering the axis at distance `x`.
pub fn rho_mean_exact(x: u64, alpha: f64) -> Result<SeriesValue> {
    let tail = weighted_series(x, alpha, "E(Z_rho)", |_| 1.0, 1.0, 0.0)?;
    Ok(SeriesValue { value: x as f64 + tail.value, ..tail })
}

/// Exact `E(Z̄_ρ^β)` for `0 < β ≤ 2`, via
/// `E g(ρ) = g(1) + Σ_{j≥0} (g(j+2) − g(j+1)) P(ρ > j+1)`.
pub fn rho_moment_exact(x: u64, alpha: f64, beta: f64) -> Result<SeriesValue> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::Precondition(format!("moment order must lie in (0, 2], got {beta}")));
    }
    let e = (beta - 1.0).max(0.0);
    let tail = weighted_series(
        x,
        alpha,
        "E(Z_rho^beta)",
        |t| (t + 1.0).powf(beta) - t.powf(beta),
        beta,
        e,
    )?;
    Ok(SeriesValue { value: (x as f64).powf(beta) + tail.value, ..tail })
}
