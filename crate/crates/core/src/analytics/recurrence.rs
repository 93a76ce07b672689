//! The mean recurrence `u_i = u_{i−1} + 2 u_{i−1}^α + 𝐜` and its closed-form
//! approximation `v_i = c1 (i + g i^{(1−2α)/(1−α)})^{1/(1−α)}`, `g = 𝐜/(2 c1^α)`.

use super::constants::constants;

/// `u_1..=u_{i_max}` (index 0 holds `u_1`).
pub fn mean_recurrence(alpha: f64, c_est: f64, u1: f64, i_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(i_max);
    if i_max == 0 {
        return out;
    }
    let mut u = u1;
    out.push(u);
    for _ in 1..i_max {
        u += 2.0 * u.powf(alpha) + c_est;
        out.push(u);
    }
    out
}

pub fn closed_form_v(alpha: f64, c_est: f64, i: f64) -> f64 {
    let k = constants(alpha).with_c_estimate(c_est);
    let g = k.g_alpha.unwrap_or(0.0);
    let b = 1.0 - alpha;
    k.c1 * (i + g * i.powf((1.0 - 2.0 * alpha) / b)).powf(1.0 / b)
}
