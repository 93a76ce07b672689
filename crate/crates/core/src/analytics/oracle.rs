//! Renewal oracle for the ½-stable limit of normalised excursion times.
//!
//! The oracle draws `H_i = Σ_{j ≤ i} T_j` for i.i.d. inter-arrival times
//! `T_j` and stores `H_i / i²`. Its ECDF stands in for the limit law, so no
//! closed-form stable CDF (and no guess about its constants) is needed.

use rayon::prelude::*;

use super::first_passage::{lazy_first_passage_from_one, lazy_survival_from_one, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rng::RngStream;
use crate::stats::EmpiricalDistribution;

/// Largest truncated tail mass accepted for an inter-arrival table.
pub const MAX_TAIL_MASS: f64 = 1e-3;
/// Smallest renewal count accepted by the oracle.
pub const MIN_RENEWALS: u64 = 1000;
/// Table horizon used for the lazy walk; its tail mass is about 8e-4.
pub const LAZY_TABLE_HORIZON: u64 = 2_000_000;

/// Inter-arrival law with an inverse-CDF sampler.
#[derive(Clone, Debug)]
pub struct InterArrival {
    law: DiscreteDistribution,
    cdf: Vec<f64>,
    exact_tail: bool,
}

impl InterArrival {
    /// A finite table. Draws landing in the untabulated tail are clamped to
    /// the horizon, which is why the tail mass must stay small.
    pub fn table(law: DiscreteDistribution) -> Self {
        let cdf = cumulative(&law.probs);
        InterArrival { law, cdf, exact_tail: false }
    }

    /// First passage to 0 of the lazy walk from height 1: table body up to
    /// `horizon`, exact closed-form tail beyond.
    pub fn lazy_from_one(horizon: u64) -> Self {
        let law = lazy_first_passage_from_one(horizon);
        let cdf = cumulative(&law.probs);
        InterArrival { law, cdf, exact_tail: true }
    }

    pub fn law(&self) -> &DiscreteDistribution {
        &self.law
    }

    pub fn tail_mass(&self) -> f64 {
        self.law.tail_mass
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform_open();
        let k = self.cdf.partition_point(|&c| c < u);
        if k < self.cdf.len() {
            return (self.law.offset + k as i64) as f64;
        }
        let horizon = self.law.horizon() as f64;
        if !self.exact_tail {
            return horizon;
        }
        // T > horizon: smallest t with P(T > t) < 1 − u.
        invert_lazy_tail(1.0 - u, horizon)
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    probs
        .iter()
        .map(|p| {
            acc.add(*p);
            acc.value()
        })
        .collect()
}

/// Smallest integer `t > from` with `P(T > t) < target`, by bisection on the
/// closed-form survival (real arithmetic once `t` passes 2^53).
fn invert_lazy_tail(target: f64, from: f64) -> f64 {
    let mut lo = from;
    let guess = 4.0 / (std::f64::consts::PI * target * target);
    let mut hi = guess.max(from + 1.0).ceil();
    while lazy_survival_from_one(hi) >= target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > (hi * 1e-15).max(1.0) {
        let mid = ((lo + hi) / 2.0).floor();
        if lazy_survival_from_one(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Clone, Debug)]
pub struct StableLimitOracle {
    pub renewals: u64,
    pub samples: EmpiricalDistribution,
    /// Tail mass of the inter-arrival table the oracle was built from.
    pub table_tail_mass: f64,
}

/// Draw `replicas` independent copies of `H_i / i²`. Replica `r` uses the
/// stream `(seed, r)`.
pub fn stable_oracle_build(
    inter_arrival: &InterArrival,
    i: u64,
    replicas: u64,
    seed: u64,
) -> Result<StableLimitOracle> {
    if inter_arrival.tail_mass() > MAX_TAIL_MASS {
        return Err(Error::OracleRejected(inter_arrival.tail_mass()));
    }
    if i < MIN_RENEWALS {
        return Err(Error::Precondition(format!(
            "oracle needs at least {MIN_RENEWALS} renewals per sample, got {i}"
        )));
    }
    if replicas == 0 {
        return Err(Error::Precondition("oracle needs at least one replica".into()));
    }
    let norm = (i as f64) * (i as f64);
    let samples: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(seed, r);
            let mut h = 0.0;
            for _ in 0..i {
                h += inter_arrival.sample(&mut rng);
            }
            h / norm
        })
        .collect();
    Ok(StableLimitOracle {
        renewals: i,
        samples: EmpiricalDistribution::new(samples)?,
        table_tail_mass: inter_arrival.tail_mass(),
    })
}

pub fn stable_oracle_cdf(oracle: &StableLimitOracle, t: f64) -> f64 {
    oracle.samples.ecdf_at(t)
}
