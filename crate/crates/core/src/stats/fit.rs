use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r2: f64,
    pub points_used: usize,
}

impl ExponentFit {
    /// `exp(intercept)`, the prefactor of the power law.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

pub fn tail_exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::DegenerateFit("coordinates must be positive".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 * n {
        return Err(Error::DegenerateFit("all x values coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .max(0.0);
    let stderr = if points.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(ExponentFit { slope, intercept, stderr, r2, points_used: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_law() {
        let pts: Vec<_> = (1..=5).map(|k| (k as f64, (k * k) as f64)).collect();
        let f = tail_exponent_fit(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.stderr < 1e-7);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_square_root() {
        let mut rng = crate::rng::RngStream::new(8, 0);
        let pts: Vec<_> = (0..20)
            .map(|k| {
                let x = 10f64.powf(k as f64 / 19.0 * 2.0);
                let noise = 1.0 + 0.01 * (2.0 * rng.uniform() - 1.0) * 3f64.sqrt();
                (x, 3.0 * x.sqrt() * noise)
            })
            .collect();
        let f = tail_exponent_fit(&pts).unwrap();
        assert!((f.slope - 0.5).abs() < 0.02);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(tail_exponent_fit(&[(2.0, 1.0), (2.0, 3.0), (2.0, 5.0)]).is_err());
        assert!(tail_exponent_fit(&[(1.0, 1.0), (2.0, 3.0)]).is_err());
        assert!(tail_exponent_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }
}
