use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fit::{tail_exponent_fit, ExponentFit};
use super::sample_variance;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceScaling {
    /// `(i, Var(S_i))` per group.
    pub points: Vec<(u64, f64)>,
    /// Power-law fit of the variance in `i`; absent when some group is constant.
    pub fit: Option<ExponentFit>,
    pub zero_variance: bool,
}

/// Fit `Var(S_i) ~ i^slope` over groups of samples keyed by `i`.
pub fn variance_scaling(groups: &BTreeMap<u64, Vec<f64>>) -> Result<VarianceScaling> {
    if groups.len() < 3 {
        return Err(Error::Precondition("need at least 3 group sizes".into()));
    }
    let (lo, hi) = (*groups.keys().next().unwrap(), *groups.keys().last().unwrap());
    if lo == 0 || (hi as f64) < 10.0 * lo as f64 {
        return Err(Error::Precondition("group sizes must span a decade".into()));
    }
    let mut points = Vec::with_capacity(groups.len());
    for (&i, xs) in groups {
        if xs.len() < 2 {
            return Err(Error::Precondition(format!("group {i} has fewer than 2 samples")));
        }
        points.push((i, sample_variance(xs)));
    }
    if points.iter().any(|&(_, v)| v <= 0.0) {
        return Ok(VarianceScaling { points, fit: None, zero_variance: true });
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(i, v)| (i as f64, v)).collect();
    let fit = tail_exponent_fit(&pts)?;
    Ok(VarianceScaling { points, fit: Some(fit), zero_variance: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn clt_scaling() {
        let mut rng = RngStream::new(12, 0);
        let mut groups = BTreeMap::new();
        for i in [10u64, 100, 1000] {
            let samples = (0..4000)
                .map(|_| (0..i).map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 }).sum())
                .collect();
            groups.insert(i, samples);
        }
        let v = variance_scaling(&groups).unwrap();
        assert!((v.fit.unwrap().slope - 1.0).abs() < 0.1);
    }

    #[test]
    fn constant_groups_flagged() {
        let groups: BTreeMap<u64, Vec<f64>> =
            [(1, vec![2.0, 2.0]), (10, vec![2.0, 2.0]), (100, vec![2.0, 2.0])].into();
        let v = variance_scaling(&groups).unwrap();
        assert!(v.zero_variance && v.fit.is_none());
    }

    #[test]
    fn small_group_rejected() {
        let groups: BTreeMap<u64, Vec<f64>> =
            [(1, vec![2.0]), (10, vec![2.0, 1.0]), (100, vec![2.0, 3.0])].into();
        assert!(variance_scaling(&groups).is_err());
    }
}
