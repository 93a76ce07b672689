//! Limit formulas for the dominant coordinate at a fixed horizon.

use serde::{Deserialize, Serialize};

use super::constants::constants;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailLimit {
    pub value: f64,
    /// The formula is a small-`a` limit; values above 1 are not probabilities.
    pub out_of_range: bool,
    /// The value is 1 to within rounding.
    pub boundary: bool,
}

/// `c2 (a/c1)^{(1−α)/2}`: small-`a` limit of `P(Z̄_n ≤ a n^{1/(2(1−α))})`.
pub fn theorem_left_tail(alpha: f64, a: f64) -> TailLimit {
    let k = constants(alpha);
    let value = k.c2 * (a / k.c1).powf(k.exp_lefttail);
    let boundary = (value - 1.0).abs() < 1e-12;
    TailLimit { value, out_of_range: value > 1.0 && !boundary, boundary }
}

/// `n^{1/(2(1−α))}`.
pub fn theorem_scaling(alpha: f64, n: f64) -> f64 {
    n.powf(constants(alpha).exp_theorem)
}
