use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted sample with ECDF and lower-quantile queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Precondition("NaN in sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of samples `≤ t`.
    pub fn count_le(&self, t: f64) -> usize {
        self.samples.partition_point(|&x| x <= t)
    }

    /// Right-continuous ECDF.
    pub fn ecdf_at(&self, t: f64) -> f64 {
        self.count_le(t) as f64 / self.len() as f64
    }

    /// Smallest sample whose ECDF value is at least `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let nf = n as f64;
        let reaches = |k: usize| k as f64 / nf >= p;
        let mut k = ((p * nf).ceil() as usize).clamp(1, n);
        while k > 1 && reaches(k - 1) {
            k -= 1;
        }
        while k < n && !reaches(k) {
            k += 1;
        }
        self.samples[k - 1]
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }
}

/// Sup-distance between two ECDFs.
pub fn ks_distance(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xs, ys) = (a.samples(), b.samples());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Dvoretzky–Kiefer–Wolfowitz half-width `sqrt(ln(2/δ)/(2n))`.
pub fn dkw_band(n: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ed(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_examples() {
        let d = ed(&[3.0, 1.0, 2.0]);
        assert!((d.ecdf_at(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.quantile(0.5), 2.0);
        assert_eq!(d.quantile(0.0), 1.0);
        assert_eq!(d.quantile(1.0), 3.0);
        assert_eq!(d.ecdf_at(0.5), 0.0);
        assert_eq!(d.ecdf_at(3.0), 1.0);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(EmpiricalDistribution::new(vec![]), Err(Error::Empty)));
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_distance(&ed(&[1.0, 2.0]), &ed(&[2.0, 1.0])), 0.0);
        assert_eq!(ks_distance(&ed(&[0.0; 3]), &ed(&[1.0; 3])), 1.0);
        assert!((ks_distance(&ed(&[1.0, 2.0, 3.0]), &ed(&[2.0])) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dkw_values() {
        assert!((dkw_band(10_000, 0.05) - 0.013_581).abs() < 1e-6);
        let near_one = dkw_band(100, 1.0 - 1e-12);
        assert!((near_one - (2f64.ln() / 200.0).sqrt()).abs() < 1e-9);
        assert!(dkw_band(u64::MAX, 0.05) < 1e-9);
    }

    #[test]
    fn uniform_ecdf() {
        let mut rng = crate::rng::RngStream::new(4, 0);
        let d = EmpiricalDistribution::new((0..1_000_000).map(|_| rng.uniform()).collect()).unwrap();
        assert!((d.ecdf_at(0.3) - 0.3).abs() < 0.002);
    }
}
