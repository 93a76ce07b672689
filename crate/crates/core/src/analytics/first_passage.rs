//! First passage to 0 of the lazy walk (±1 with probability ¼ each, hold
//! with probability ½).
//!
//! Inside the open cone the vertical coordinate of every model is exactly
//! this lazy walk, so its hitting time of 0 is the cone part of an
//! excursion. Two independent routes are provided: a dynamic program over
//! heights, and closed forms. The lazy walk observed at time `t` has the law
//! of a simple random walk at time `2t` halved, which gives
//! `P(T > t) = P(−2h < S_{2t} ≤ 2h)` by reflection; for `h = 1` this is
//! `r_t (2t+1)/(t+1)` with `r_t = C(2t, t)/4^t`, and `P(T = t) = r_t/(t+1)`.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// A law on `offset, offset+1, ...` stored up to a horizon, with the mass
/// beyond the horizon kept separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    pub offset: i64,
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl DiscreteDistribution {
    pub fn new(offset: i64, probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) || !(tail_mass >= 0.0) {
            return Err(Error::Precondition("probabilities must be nonnegative".into()));
        }
        let d = DiscreteDistribution { offset, probs, tail_mass };
        let total = d.total();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("masses sum to {total}, not 1")));
        }
        Ok(d)
    }

    pub fn point_mass(at: i64) -> Self {
        DiscreteDistribution { offset: at, probs: vec![1.0], tail_mass: 0.0 }
    }

    /// Stored mass plus tail mass.
    pub fn total(&self) -> f64 {
        let mut s: CompensatedSum = self.probs.iter().copied().collect();
        s.add(self.tail_mass);
        s.value()
    }

    /// Last point with stored mass.
    pub fn horizon(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn pmf(&self, k: i64) -> f64 {
        if k < self.offset {
            return 0.0;
        }
        self.probs.get((k - self.offset) as usize).copied().unwrap_or(0.0)
    }

    /// `P(T > k)` for `k` up to the horizon; beyond it only `tail_mass` is known.
    pub fn survival(&self, k: i64) -> f64 {
        if k >= self.horizon() {
            return self.tail_mass;
        }
        let from = (k + 1 - self.offset).max(0) as usize;
        let mut s: CompensatedSum = self.probs[from..].iter().copied().collect();
        s.add(self.tail_mass);
        s.value()
    }

    pub fn mean_truncated(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(j, p)| (self.offset + j as i64) as f64 * p)
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Mass below this is dropped from the DP band (and booked as tail mass).
const BAND_FLOOR: f64 = 1e-300;

/// Exact law of the first hitting time of 0 from height `h`, for times
/// `1..=n_max`, by dynamic programming over heights.
pub fn lazy_first_passage(h: u64, n_max: u64) -> Result<DiscreteDistribution> {
    if h == 0 || n_max == 0 {
        return Err(Error::Precondition("need h >= 1 and n_max >= 1".into()));
    }
    let h = h as usize;
    let size = h + n_max as usize + 2;
    let mut q = vec![0.0f64; size];
    let mut next = vec![0.0f64; size];
    q[h] = 1.0;
    let (mut lo, mut hi) = (h, h);
    let mut dropped = 0.0;
    let mut probs = Vec::with_capacity(n_max as usize);
    for _ in 0..n_max {
        probs.push(0.25 * q[1]);
        let new_lo = lo.saturating_sub(1).max(1);
        let new_hi = hi + 1;
        for j in new_lo..=new_hi {
            next[j] = 0.25 * q[j - 1] + 0.5 * q[j] + 0.25 * q[j + 1];
        }
        // q[0] is always zero: mass reaching 0 was absorbed.
        next[0] = 0.0;
        for j in lo..=hi {
            q[j] = 0.0;
        }
        std::mem::swap(&mut q, &mut next);
        lo = new_lo;
        hi = new_hi;
        while hi > lo && q[hi] < BAND_FLOOR {
            dropped += q[hi];
            q[hi] = 0.0;
            hi -= 1;
        }
        while lo < hi && q[lo] < BAND_FLOOR && lo > 1 {
            dropped += q[lo];
            q[lo] = 0.0;
            lo += 1;
        }
    }
    let alive: CompensatedSum = q[lo..=hi].iter().copied().collect();
    Ok(DiscreteDistribution { offset: 1, probs, tail_mass: alive.value() + dropped })
}

/// `C(2t, t)/4^t`.
pub fn central_binomial_ratio(t: u64) -> f64 {
    if t < 64 {
        let mut r = 1.0;
        for s in 1..=t {
            r *= (2 * s - 1) as f64 / (2 * s) as f64;
        }
        return r;
    }
    central_binomial_ratio_f(t as f64)
}

/// `C(2t, t)/4^t` for real `t ≥ 0` (product below 64, Stirling above).
pub fn central_binomial_ratio_real(t: f64) -> f64 {
    if t < 64.0 {
        central_binomial_ratio(t as u64)
    } else {
        central_binomial_ratio_f(t)
    }
}

/// Stirling series for `C(2t, t)/4^t`, valid for real `t ≥ 64`.
fn central_binomial_ratio_f(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv3 = inv * inv * inv;
    let log = -0.5 * (std::f64::consts::PI * t).ln() - inv / 8.0 + inv3 / 192.0
        - inv3 * inv * inv / 640.0;
    log.exp()
}

/// `P(T > t)` from height 1 (closed form), for real `t` so that the far
/// tail can be evaluated past `u64` range.
pub fn lazy_survival_from_one(t: f64) -> f64 {
    if t < 1.0 {
        return 1.0;
    }
    let r = if t < 64.0 {
        central_binomial_ratio(t as u64)
    } else {
        central_binomial_ratio_f(t)
    };
    r * (2.0 * t + 1.0) / (t + 1.0)
}

/// `P(T = t)` from height 1 (closed form).
pub fn lazy_pmf_from_one(t: u64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    central_binomial_ratio(t) / (t + 1) as f64
}

/// `P(T > t)` from height `h` via `P(t−h < Bin(2t, ½) ≤ t+h)`.
pub fn lazy_survival(h: u64, t: u64) -> f64 {
    let n = 2 * t;
    let lo = (t + 1).saturating_sub(h);
    let hi = (t + h).min(n);
    let ln4t = n as f64 * std::f64::consts::LN_2;
    (lo..=hi)
        .map(|k| (ln_binomial(n, k) - ln4t).exp())
        .collect::<CompensatedSum>()
        .value()
        .min(1.0)
}

/// Closed-form law from height 1 on `1..=n_max`, tail mass exact.
pub fn lazy_first_passage_from_one(n_max: u64) -> DiscreteDistribution {
    let probs = (1..=n_max).map(lazy_pmf_from_one).collect();
    DiscreteDistribution {
        offset: 1,
        probs,
        tail_mass: lazy_survival_from_one(n_max as f64),
    }
}
