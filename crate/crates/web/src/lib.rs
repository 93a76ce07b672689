//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string (or an error message) so the page only
//! needs `JSON.parse`.

use std::ops::ControlFlow;

use axiswalk::analytics::{arcsine_cdf, rho_mean_asymptotic, rho_mean_exact};
use axiswalk::excursion::summarize_walk;
use axiswalk::{simulate_path, Engine, LatticeState, ModelKind, ModelSpec, RngStream};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest horizon the page may request; keeps the tab responsive.
const MAX_STEPS: u64 = 5_000_000;
const MAX_POINTS: u64 = 20_000;

fn model(name: &str, alpha: f64) -> Result<ModelSpec, String> {
    let kind: ModelKind = name.parse().map_err(|e: axiswalk::Error| e.to_string())?;
    ModelSpec::new(kind, alpha).map_err(|e| e.to_string())
}

/// Positions of one run from (1, 1), thinned to at most 20 000 points:
/// `{"t": [...], "x": [...], "y": [...]}`.
#[wasm_bindgen]
pub fn sample_trajectory(model_name: &str, alpha: f64, n: u64, seed: u64) -> Result<String, String> {
    let spec = model(model_name, alpha)?;
    if n == 0 || n > MAX_STEPS {
        return Err(format!("n must be between 1 and {MAX_STEPS}"));
    }
    let stride = n.div_ceil(MAX_POINTS);
    let (mut ts, mut xs, mut ys) = (Vec::new(), Vec::new(), Vec::new());
    let mut rng = RngStream::new(seed, 0);
    simulate_path(&spec, LatticeState::ORIGIN_DIAGONAL, n, &mut rng, &mut |t: u64, s: LatticeState| {
        if t % stride == 0 || t == n {
            ts.push(t);
            xs.push(s.x);
            ys.push(s.y);
        }
        ControlFlow::Continue(())
    })
    .map_err(|e| e.to_string())?;
    Ok(json!({"t": ts, "x": xs, "y": ys}).to_string())
}

/// Exact mean of `Z̄` at the end of an axis stay from `(x, 0)` next to its
/// four-term expansion.
#[wasm_bindgen]
pub fn axis_stay_mean(x: u64, alpha: f64) -> Result<String, String> {
    if x == 0 {
        return Err("x must be at least 1".into());
    }
    let asym = rho_mean_asymptotic(x as f64, alpha);
    Ok(match rho_mean_exact(x, alpha) {
        Ok(v) => json!({
            "exact": v.value,
            "remainder_bound": v.remainder_bound,
            "terms": v.terms,
            "expansion": asym,
            "difference": v.value - asym,
        }),
        Err(e) => json!({"error": e.to_string(), "expansion": asym}),
    }
    .to_string())
}

/// Empirical law of the current excursion's age over `n` for the coupled
/// walk against the arcsine law, on ε = 0.05, 0.10, …, 0.95.
#[wasm_bindgen]
pub fn excursion_age_law(alpha: f64, n: u64, replicas: u64, seed: u64) -> Result<String, String> {
    let spec = ModelSpec::new(ModelKind::CoupledHalfPlane, alpha).map_err(|e| e.to_string())?;
    if n == 0 || n > MAX_STEPS || replicas == 0 || replicas > 10_000 {
        return Err(format!("need 1 ≤ n ≤ {MAX_STEPS} and 1 ≤ replicas ≤ 10000"));
    }
    let mut ages = Vec::with_capacity(replicas as usize);
    for r in 0..replicas {
        let mut rng = RngStream::new(seed, r);
        let s = summarize_walk(&spec, LatticeState::ORIGIN_DIAGONAL, n, &mut rng, Engine::Phase)
            .map_err(|e| e.to_string())?;
        ages.push(s.renewal_age as f64 / n as f64);
    }
    let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    let empirical: Vec<f64> =
        grid.iter().map(|&e| ages.iter().filter(|&&a| a <= e).count() as f64 / replicas as f64).collect();
    let arcsine: Vec<f64> = grid.iter().map(|&e| arcsine_cdf(e)).collect();
    Ok(json!({"epsilon": grid, "empirical": empirical, "arcsine": arcsine}).to_string())
}
