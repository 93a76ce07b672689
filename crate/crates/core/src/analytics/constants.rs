use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Constant multiplying `u^{1/2}` in the small-u tail of the renewal count,
/// as stated for the theorem: `8/√π`.
pub const C2_STATED: f64 = 4.513_516_668_382_05;

/// The same constant as computed from the lazy walk's exact first-passage
/// law: `lim √t·P(T > t) = 2/√π` for a start at height 1.
pub fn c2_lazy_walk() -> f64 {
    2.0 / PI.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub alpha: f64,
    /// `(2(1−α))^{1/(1−α)}`; NaN for `α ≥ 1`.
    pub c1: f64,
    pub c2: f64,
    /// `1/(1−α)`, growth exponent of `Z̄_{ρ_i}` in `i`.
    pub exp_lln: f64,
    /// `1/(2(1−α))`, growth exponent of `Z̄_n` in `n`.
    pub exp_theorem: f64,
    /// `(1−α)/2`, small-a exponent of the left tail.
    pub exp_lefttail: f64,
    /// `𝐜/(2 c1^α)`, only once an estimate of 𝐜 is supplied.
    pub g_alpha: Option<f64>,
    /// False outside `0 < α < ½`, where the limit theorems are not claimed.
    pub in_theorem_range: bool,
}

pub fn constants(alpha: f64) -> Constants {
    let beta = 1.0 - alpha;
    let c1 = if beta > 0.0 { (2.0 * beta).powf(1.0 / beta) } else { f64::NAN };
    Constants {
        alpha,
        c1,
        c2: C2_STATED,
        exp_lln: 1.0 / beta,
        exp_theorem: 1.0 / (2.0 * beta),
        exp_lefttail: beta / 2.0,
        g_alpha: None,
        in_theorem_range: alpha > 0.0 && alpha < 0.5,
    }
}

impl Constants {
    pub fn with_c_estimate(mut self, c: f64) -> Self {
        self.g_alpha = Some(c / (2.0 * self.c1.powf(self.alpha)));
        self
    }
}
