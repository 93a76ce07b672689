/// CDF of the arcsine law on `[0, 1]`: `(2/π)·asin(√ε)`.
pub fn arcsine_cdf(eps: f64) -> f64 {
    let e = eps.clamp(0.0, 1.0);
    std::f64::consts::FRAC_2_PI * e.sqrt().asin()
}
