//! Estimators and tolerances for each registered target.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::cache::cached;
use super::{Comparison, Criterion, Source, TargetInfo};
use crate::analytics::oracle::{InterArrival, LAZY_TABLE_HORIZON, MIN_RENEWALS};
use crate::analytics::{
    arcsine_cdf, closed_form_v, constants, mean_recurrence, rho_mean_asymptotic, rho_mean_exact,
    stable_oracle_build, stable_oracle_cdf, StableLimitOracle,
};
use crate::analytics::constants::{c2_lazy_walk, C2_STATED};
use crate::engine::run_path;
use crate::error::{Error, Result};
use crate::excursion::{run_excursions, summarize_walk, WalkSummary};
use crate::harness::config::{ExperimentConfig, Horizon, Overrides};
use crate::model::{LatticeState, ModelKind, ModelSpec};
use crate::rng::RngStream;
use crate::stats::{ks_distance, log_grid, mean_se, tail_exponent_fit, variance_scaling, EmpiricalDistribution};

type Info = BTreeMap<String, Value>;
type Outcome = Result<(Vec<Criterion>, Info)>;

/// Tail probabilities resting on fewer hits than this are left out of fits.
const MIN_TAIL_COUNT: usize = 5;
/// Renewal-oracle replicas; enough that its own ECDF noise is below 0.01.
const ORACLE_REPLICAS: u64 = 20_000;
/// Keeps the oracle's streams apart from the simulation's.
const ORACLE_SALT: u64 = 0x6f72_6163_6c65;

pub(super) fn run(info: &TargetInfo, cfg: &ExperimentConfig, ov: &Overrides) -> Outcome {
    match info.id {
        "lln" => lln(cfg),
        "mean-asymptotic" => mean_asymptotic(ov),
        "recurrence-sandwich" => recurrence_sandwich(cfg),
        "nn-left-tail" => nn_left_tail(cfg),
        "theorem-left-tail" => theorem_left_tail(cfg),
        "theorem-right-tail" => theorem_right_tail(cfg),
        "arcsine" => arcsine(cfg),
        "commitment" => commitment(cfg),
        "coupling-ks" => coupling_ks(cfg),
        "variance-scaling" => variance(cfg),
        "ballistic" => ballistic(cfg),
        "quadrant-commit" => quadrant_commit(cfg),
        "subordinator-marginal" => subordinator_marginal(cfg),
        "submartingale" => submartingale(cfg),
        "eta-moment" => eta_moment(cfg),
        other => Err(Error::UnknownTarget(other.to_string())),
    }
}

fn steps(cfg: &ExperimentConfig) -> Result<u64> {
    match cfg.horizon {
        Horizon::Steps(n) if n >= 1 => Ok(n),
        _ => Err(Error::Config("this target needs a step horizon n >= 1 (--n)".into())),
    }
}

fn excursions(cfg: &ExperimentConfig, at_least: u64) -> Result<u64> {
    match cfg.horizon {
        Horizon::Excursions(i) if i >= at_least => Ok(i),
        _ => Err(Error::Config(format!("this target needs --excursions of at least {at_least}"))),
    }
}

fn frac(count: usize, total: usize) -> f64 {
    count as f64 / total as f64
}

// ---------------------------------------------------------------------------
// Shared batches

/// Per-walk summaries at a fixed horizon. Replica `r` uses stream
/// `(seed, offset + r)`.
fn walk_summaries(cfg: &ExperimentConfig, model: ModelSpec, offset: u64) -> Result<Arc<Vec<WalkSummary>>> {
    let n = steps(cfg)?;
    let key = format!(
        "summaries/{:?}/{:?}/{n}/{}/{}/{offset}/{:?}",
        model, cfg.start, cfg.replicas, cfg.seed, cfg.engine
    );
    cached(key, || {
        (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(cfg.seed, offset + r);
                summarize_walk(&model, cfg.start, n, &mut rng, cfg.engine)
            })
            .collect()
    })
}

#[derive(Clone, Copy, Debug)]
struct Kept {
    index: u64,
    z_rho: i64,
    axis_gain: i64,
}

struct ExcursionReplica {
    kept: Vec<Kept>,
    /// Exits where `Z̄_ρ` differs from the start plus both gain sums.
    violations: u64,
}

impl ExcursionReplica {
    fn at(&self, i: u64) -> Kept {
        let k = self.kept.binary_search_by_key(&i, |k| k.index).expect("index was kept");
        self.kept[k]
    }
}

struct ExcursionBatch {
    replicas: Vec<ExcursionReplica>,
    /// `Σ_r Z̄_{ρ_i}` at slot `i − 1`, for every `i`.
    z_sum: Vec<i128>,
}

impl ExcursionBatch {
    fn mean_z(&self, i: u64) -> f64 {
        self.z_sum[i as usize - 1] as f64 / self.replicas.len() as f64
    }

    fn column(&self, i: u64, f: impl Fn(Kept) -> f64) -> Vec<f64> {
        self.replicas.iter().map(|r| f(r.at(i))).collect()
    }
}

/// Blocks of consecutive indices tiling `[i_max/10, i_max]`.
fn recurrence_blocks(i_max: u64) -> Vec<(u64, u64)> {
    let lo = (i_max / 10).max(2);
    let count = 9.min(i_max - lo + 1);
    let width = (i_max - lo + 1) / count;
    (0..count)
        .map(|k| {
            let a = lo + k * width;
            let b = if k + 1 == count { i_max } else { a + width - 1 };
            (a, b)
        })
        .collect()
}

fn excursion_batch(cfg: &ExperimentConfig) -> Result<Arc<ExcursionBatch>> {
    let i_max = excursions(cfg, 100)?;
    let key = format!(
        "excursions/{:?}/{:?}/{i_max}/{}/{}/{:?}/{:?}",
        cfg.model, cfg.start, cfg.replicas, cfg.seed, cfg.engine, cfg.thinning
    );
    cached(key, || {
        let mut keep = cfg.thinning.indices(i_max);
        for (a, b) in recurrence_blocks(i_max) {
            keep.extend([a - 1, b]);
        }
        keep.extend([i_max / 100, i_max / 10]);
        keep.sort_unstable();
        keep.dedup();
        let z_start = cfg.start.z_bar();
        let z_sum = Mutex::new(vec![0i128; i_max as usize]);
        let replicas = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(cfg.seed, r);
                let mut kept = Vec::with_capacity(keep.len());
                let mut dense = Vec::with_capacity(i_max as usize);
                let mut violations = 0;
                let mut next = 0;
                let tracker = run_excursions(&cfg.model, cfg.start, i_max, u64::MAX, &mut rng, cfg.engine, |e| {
                    let rec = e.record;
                    dense.push(rec.z_at_rho);
                    if rec.z_at_rho != z_start + e.gains.axis_gain + e.gains.cone_change {
                        violations += 1;
                    }
                    if next < keep.len() && keep[next] == rec.index {
                        next += 1;
                        kept.push(Kept { index: rec.index, z_rho: rec.z_at_rho, axis_gain: e.gains.axis_gain });
                    }
                })?;
                if tracker.z_rho0() != z_start {
                    violations = i_max;
                }
                let mut sum = z_sum.lock().unwrap();
                for (s, z) in sum.iter_mut().zip(&dense) {
                    *s += *z as i128;
                }
                Ok(ExcursionReplica { kept, violations })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExcursionBatch { replicas, z_sum: z_sum.into_inner().unwrap() })
    })
}

fn lazy_oracle(i: u64, replicas: u64, seed: u64) -> Result<Arc<StableLimitOracle>> {
    static LAW: OnceLock<InterArrival> = OnceLock::new();
    let law = LAW.get_or_init(|| InterArrival::lazy_from_one(LAZY_TABLE_HORIZON));
    cached(format!("oracle/{i}/{replicas}/{seed}"), || {
        stable_oracle_build(law, i, replicas, seed ^ ORACLE_SALT)
    })
}

// ---------------------------------------------------------------------------
// Targets

fn lln(cfg: &ExperimentConfig) -> Outcome {
    let i_max = excursions(cfg, 100)?;
    let b = excursion_batch(cfg)?;
    let k = constants(cfg.model.alpha);
    let stat = |i: u64| mean_se(&b.column(i, |r| r.z_rho as f64 / (i as f64).powf(k.exp_lln)));
    let (mean, se) = stat(i_max);
    let violations: u64 = b.replicas.iter().map(|r| r.violations).sum();
    let mut info = Info::new();
    info.insert("standard_error".into(), json!(se));
    info.insert("c1".into(), json!(k.c1));
    info.insert("in_theorem_range".into(), json!(k.in_theorem_range));
    for i in [i_max / 100, i_max / 10] {
        info.insert(format!("mean_statistic_at_{i}"), json!(stat(i).0));
    }
    let criteria = vec![
        // Corrections to the limit are of relative order i^{−α/(1−α)}, about
        // 10% at i = 10^4 and α = 0.2, hence the 15% band.
        Criterion::new(
            "mean-ratio",
            format!("mean of Z̄_ρi / i^{:.4} at i = {i_max}", k.exp_lln),
            mean,
            k.c1,
            0.15,
            Comparison::RelWithin,
            Source::ClosedForm,
        ),
        Criterion::new(
            "gain-reconstruction",
            "exits where Z̄_ρi differs from Z̄_ρ0 plus the axis and cone gain sums",
            violations as f64,
            0.0,
            0.0,
            Comparison::AbsWithin,
            Source::ExactIdentity,
        ),
    ];
    Ok((criteria, info))
}

fn mean_asymptotic(ov: &Overrides) -> Outcome {
    let alphas = ov.alpha.map_or_else(|| vec![0.2, 0.3, 0.4], |a| vec![a]);
    let mut criteria = Vec::new();
    let mut info = Info::new();
    for &alpha in &alphas {
        for x in [1_000u64, 10_000, 100_000, 1_000_000] {
            let exact = rho_mean_exact(x, alpha)?;
            let asym = rho_mean_asymptotic(x as f64, alpha);
            let xf = x as f64;
            info.insert(
                format!("alpha={alpha},x={x}"),
                json!({
                    "exact": exact.value,
                    "remainder_bound": exact.remainder_bound,
                    "terms": exact.terms,
                    "exact_minus_expansion": exact.value - asym,
                }),
            );
            criteria.push(Criterion::new(
                format!("alpha={alpha},x={x}"),
                "expansion x + 2x^α − 3/2 − x^{−α}/6 against the certified exact mean",
                asym,
                exact.value,
                10.0 * xf.powf(-2.0 * alpha),
                Comparison::AbsWithin,
                Source::ExactSeries,
            ));
        }
    }
    Ok((criteria, info))
}

fn recurrence_sandwich(cfg: &ExperimentConfig) -> Outcome {
    let i_max = excursions(cfg, 100)?;
    let b = excursion_batch(cfg)?;
    let alpha = cfg.model.alpha;
    let reps = b.replicas.len() as f64;
    let drift = |i: u64| 2.0 * b.mean_z(i - 1).powf(alpha);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut blocks = Vec::new();
    for (a, e) in recurrence_blocks(i_max) {
        let len = (e - a + 1) as f64;
        let per_replica: Vec<f64> =
            b.replicas.iter().map(|r| (r.at(e).z_rho - r.at(a - 1).z_rho) as f64 / len).collect();
        let (_, se) = mean_se(&per_replica);
        let mean_step = (b.mean_z(e) - b.mean_z(a - 1)) / len;
        let residual = mean_step - (a..=e).map(drift).sum::<f64>() / len;
        lo = lo.min(residual - 2.0 * se);
        hi = hi.max(residual + 2.0 * se);
        blocks.push(json!({"from": a, "to": e, "residual": residual, "standard_error": se}));
    }
    let first = recurrence_blocks(i_max)[0].0;
    let span = (i_max - first + 1) as f64;
    let c_est = (b.mean_z(i_max) - b.mean_z(first - 1) - (first..=i_max).map(drift).sum::<f64>()) / span;
    let k = constants(alpha).with_c_estimate(c_est);
    let m_end = b.mean_z(i_max);
    let v_end = closed_form_v(alpha, c_est, i_max as f64);
    let u = mean_recurrence(alpha, c_est, b.mean_z(1), i_max as usize);
    let mut info = Info::new();
    info.insert("blocks".into(), Value::Array(blocks));
    info.insert("band".into(), json!([lo, hi]));
    info.insert("c_estimate".into(), json!(c_est));
    info.insert("g_alpha".into(), json!(k.g_alpha));
    info.insert("replicas".into(), json!(reps));
    info.insert("closed_form_relative_gap_at_end".into(), json!((v_end - m_end) / m_end));
    info.insert("recurrence_relative_gap_at_end".into(), json!((u[u.len() - 1] - m_end) / m_end));
    // A band of width 1 pins the additive constant to within ±½ while leaving
    // room for the O(m^{α−1}) drift of the residual across the range.
    let criteria = vec![Criterion::new(
        "sandwich-width",
        format!("hi − lo of block residuals ± 2 s.e. over i in [{first}, {i_max}]"),
        hi - lo,
        1.0,
        0.0,
        Comparison::AtMost,
        Source::Calibration,
    )];
    Ok((criteria, info))
}

fn variance(cfg: &ExperimentConfig) -> Outcome {
    let i_max = excursions(cfg, 100)?;
    let b = excursion_batch(cfg)?;
    let alpha = cfg.model.alpha;
    let groups: BTreeMap<u64, Vec<f64>> = [i_max / 100, i_max / 10, i_max]
        .into_iter()
        .map(|i| (i, b.column(i, |r| r.axis_gain as f64)))
        .collect();
    let v = variance_scaling(&groups)?;
    let bound = (2.0 * alpha + 2.0) / (1.0 - alpha);
    let (slope, stderr) = v.fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.stderr));
    let mut info = Info::new();
    info.insert("slope".into(), json!(slope));
    info.insert("slope_stderr".into(), json!(stderr));
    info.insert("variances".into(), json!(v.points));
    info.insert("zero_variance".into(), json!(v.zero_variance));
    let criteria = vec![Criterion::new(
        "variance-exponent",
        "fitted exponent plus two standard errors, against (2α+2)/(1−α)",
        slope + 2.0 * stderr,
        bound,
        0.0,
        Comparison::Below,
        Source::ClosedForm,
    )];
    Ok((criteria, info))
}

fn submartingale(cfg: &ExperimentConfig) -> Outcome {
    let i_max = excursions(cfg, 100)?;
    let b = excursion_batch(cfg)?;
    let dense = cfg.thinning.dense_until.min(i_max);
    let mut bins: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for r in &b.replicas {
        for i in 2..=dense {
            let (prev, cur) = (r.at(i - 1).z_rho, r.at(i).z_rho);
            let bin = 63 - (prev.max(1) as u64).leading_zeros();
            bins.entry(bin).or_default().push((cur - prev) as f64);
        }
    }
    let mut worst = f64::INFINITY;
    let mut rows = Vec::new();
    for (bin, xs) in &bins {
        if xs.len() < 50 {
            continue;
        }
        let (mean, se) = mean_se(xs);
        let z = if se > 0.0 { mean / se } else if mean >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        worst = worst.min(z);
        rows.push(json!({"z_from": 1u64 << bin, "count": xs.len(), "mean_increment": mean, "standard_error": se}));
    }
    let grew = b.replicas.iter().filter(|r| r.at(i_max).z_rho > r.at(1).z_rho).count();
    let mut info = Info::new();
    info.insert("bins".into(), Value::Array(rows));
    info.insert("fraction_grown_by_end".into(), json!(frac(grew, b.replicas.len())));
    let criteria = vec![Criterion::new(
        "conditional-drift",
        "smallest z-score of the mean increment of Z̄_ρ given Z̄ at the previous exit (log2 bins)",
        worst,
        -3.0,
        0.0,
        Comparison::AtLeast,
        Source::SamplingNoise,
    )];
    Ok((criteria, info))
}

fn nn_left_tail(cfg: &ExperimentConfig) -> Outcome {
    let n = steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let counts = EmpiricalDistribution::new(s.iter().map(|w| w.count_n as f64).collect())?;
    let root = (n as f64).sqrt();
    let total = counts.len();
    let points: Vec<(f64, f64)> = log_grid(0.02, 0.3, 12)
        .into_iter()
        .filter_map(|u| {
            let c = counts.count_le(u * root);
            (c >= MIN_TAIL_COUNT).then(|| (u, frac(c, total)))
        })
        .collect();
    let mut info = Info::new();
    info.insert("points".into(), json!(points));
    let fit = tail_exponent_fit(&points);
    let slope = fit.as_ref().map_or(f64::NAN, |f| f.slope);
    if let Ok(f) = &fit {
        let at_half = (points.iter().map(|(u, p)| (p / u.sqrt()).ln()).sum::<f64>() / points.len() as f64).exp();
        let (stated, renewal) = (C2_STATED, c2_lazy_walk());
        info.insert("fit".into(), json!(f));
        info.insert("prefactor_free_slope".into(), json!(f.prefactor()));
        info.insert("prefactor_at_exponent_half".into(), json!(at_half));
        info.insert("c2_stated".into(), json!(stated));
        info.insert("c2_renewal".into(), json!(renewal));
        let closer = if (at_half - stated).abs() < (at_half - renewal).abs() { "stated 8/sqrt(pi)" } else { "renewal 2/sqrt(pi)" };
        info.insert(
            "constant_comparison".into(),
            json!(format!(
                "prefactor at exponent 1/2 is {at_half:.4}; stated constant {stated:.4}, renewal constant {renewal:.4}; closer to the {closer} value; agreement with either requires the exponent to match"
            )),
        );
    }
    // ±0.1 absorbs finite-n curvature of the log-log tail over a 15-fold u range.
    let criteria = vec![Criterion::new(
        "tail-exponent",
        "log-log slope of P(N_n ≤ u√n) for u in [0.02, 0.3]",
        slope,
        0.5,
        0.1,
        Comparison::AbsWithin,
        Source::ClosedForm,
    )];
    Ok((criteria, info))
}

fn theorem_left_tail(cfg: &ExperimentConfig) -> Outcome {
    let n = steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let k = constants(cfg.model.alpha);
    let scale = (n as f64).powf(k.exp_theorem);
    let w = EmpiricalDistribution::new(s.iter().map(|w| w.z_bar_n as f64 / scale).collect())?;
    let total = w.len();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut last = usize::MAX;
    for a in log_grid(1e-4, 10.0, 60) {
        let c = w.count_le(a);
        if c >= 20 && c <= total / 10 && c != last {
            points.push((a, frac(c, total)));
            last = c;
        }
    }
    let fit = tail_exponent_fit(&points);
    let slope = fit.as_ref().map_or(f64::NAN, |f| f.slope);
    let mut info = Info::new();
    info.insert("points".into(), json!(points));
    if let Ok(f) = &fit {
        info.insert("fit".into(), json!(f));
        info.insert("predicted_prefactor".into(), json!(k.c2 * k.c1.powf(-k.exp_lefttail)));
    }
    if let Some(&(a, p)) = points.first() {
        info.insert(
            "smallest_point".into(),
            json!({"a": a, "empirical": p, "limit_formula": crate::analytics::theorem_left_tail(k.alpha, a)}),
        );
    }
    let criteria = vec![Criterion::new(
        "tail-exponent",
        "log-log slope of P(Z̄_n ≤ a n^{1/(2(1−α))}) where 20 ≤ count ≤ replicas/10",
        slope,
        k.exp_lefttail,
        0.1,
        Comparison::AbsWithin,
        Source::ClosedForm,
    )];
    Ok((criteria, info))
}

fn theorem_right_tail(cfg: &ExperimentConfig) -> Outcome {
    let n = steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let k = constants(cfg.model.alpha);
    let oracle = lazy_oracle(MIN_RENEWALS, ORACLE_REPLICAS, cfg.seed)?;
    let z = EmpiricalDistribution::new(s.iter().map(|w| w.z_bar_n as f64).collect())?;
    let scale = (n as f64).powf(k.exp_theorem);
    let power = 2.0 * (1.0 - k.alpha);
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for q in 1..=9 {
        let arg = oracle.samples.quantile(q as f64 / 10.0);
        let a = arg.powf(1.0 / power) / k.c1;
        let threshold = scale / a;
        // P(Z̄_n ≥ threshold) = 1 − P(Z̄_n < threshold).
        let below = z.samples().partition_point(|&v| v < threshold);
        let empirical = 1.0 - frac(below, z.len());
        let expected = stable_oracle_cdf(&oracle, arg);
        worst = worst.max((empirical - expected).abs());
        rows.push(json!({
            "a": a,
            "empirical": empirical,
            "renewal_limit": expected,
            "limit_at_(c1/a)^(2(1-alpha))": stable_oracle_cdf(&oracle, (k.c1 / a).powf(power)),
        }));
    }
    let mut info = Info::new();
    info.insert("grid".into(), Value::Array(rows));
    info.insert("oracle_renewals".into(), json!(oracle.renewals));
    info.insert("oracle_replicas".into(), json!(oracle.samples.len()));
    // 0.05 covers the ECDF noise of both samples plus slow LLN convergence.
    let criteria = vec![Criterion::new(
        "right-tail",
        "max deviation of P(Z̄_n ≥ a^{−1} n^{1/(2(1−α))}) from the renewal limit at (a c1)^{2(1−α)}",
        worst,
        0.0,
        0.05,
        Comparison::AbsWithin,
        Source::RenewalOracle,
    )];
    Ok((criteria, info))
}

fn arcsine(cfg: &ExperimentConfig) -> Outcome {
    let n = steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let ages = EmpiricalDistribution::new(s.iter().map(|w| w.renewal_age as f64 / n as f64).collect())?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for e in 1..=9 {
        let eps = e as f64 / 10.0;
        let (emp, law) = (ages.ecdf_at(eps), arcsine_cdf(eps));
        worst = worst.max((emp - law).abs());
        rows.push(json!({"epsilon": eps, "empirical": emp, "arcsine": law}));
    }
    let mut info = Info::new();
    info.insert("grid".into(), Value::Array(rows));
    let criteria = vec![Criterion::new(
        "arcsine-law",
        "max over ε in {0.1..0.9} of |P(n − ρ_Nn ≤ εn) − (2/π) asin √ε|",
        worst,
        0.0,
        0.05,
        Comparison::AbsWithin,
        Source::ClosedForm,
    )];
    Ok((criteria, info))
}

fn commitment(cfg: &ExperimentConfig) -> Outcome {
    let n = steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let cutoff = (n as f64).powf(0.9);
    let committed = s.iter().filter(|w| (w.commitment_time as f64) <= cutoff && !w.uncommitted).count();
    let uncommitted = s.iter().filter(|w| w.uncommitted).count();
    let mut info = Info::new();
    info.insert("cutoff".into(), json!(cutoff));
    info.insert("uncommitted_fraction".into(), json!(frac(uncommitted, s.len())));
    let criteria = vec![Criterion::new(
        "committed-fraction",
        "fraction of runs whose last visit to the abandoned axis is before n^0.9",
        frac(committed, s.len()),
        0.95,
        0.0,
        Comparison::AtLeast,
        Source::Calibration,
    )];
    Ok((criteria, info))
}

fn coupling_ks(cfg: &ExperimentConfig) -> Outcome {
    steps(cfg)?;
    let coupled = ModelSpec { kind: ModelKind::CoupledHalfPlane, ..cfg.model };
    let a = walk_summaries(cfg, cfg.model, 0)?;
    // Disjoint stream indices keep the two samples independent.
    let b = walk_summaries(cfg, coupled, cfg.replicas)?;
    let za = EmpiricalDistribution::new(a.iter().map(|w| w.z_bar_n as f64).collect())?;
    let zb = EmpiricalDistribution::new(b.iter().map(|w| w.z_bar_n as f64).collect())?;
    let d = ks_distance(&za, &zb);
    let mut info = Info::new();
    info.insert("two_sample_99pct_critical".into(), json!(1.63 * (2.0 / cfg.replicas as f64).sqrt()));
    info.insert("median_z_bar".into(), json!([za.quantile(0.5), zb.quantile(0.5)]));
    let criteria = vec![Criterion::new(
        "ks-distance",
        format!("KS distance between Z̄_n of {} and of the coupled walk", cfg.model.kind),
        d,
        0.0,
        0.05,
        Comparison::AbsWithin,
        Source::Calibration,
    )];
    Ok((criteria, info))
}

fn ballistic(cfg: &ExperimentConfig) -> Outcome {
    let n = steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let (mean, se) = mean_se(&s.iter().map(|w| w.z_bar_n as f64 / n as f64).collect::<Vec<_>>());
    let divergence = rho_mean_exact(1, 1.0);
    let mut info = Info::new();
    info.insert("standard_error".into(), json!(se));
    info.insert(
        "alpha_one_series".into(),
        json!(match &divergence {
            Ok(v) => format!("converged to {}", v.value),
            Err(e) => e.to_string(),
        }),
    );
    let criteria = vec![
        Criterion::new(
            "speed",
            "mean of Z̄_n / n",
            mean,
            0.9,
            0.0,
            Comparison::AtLeast,
            Source::Calibration,
        ),
        Criterion::new(
            "divergence-at-one",
            "exact mean axis stay at α = 1 is certified infinite (1 = yes)",
            matches!(divergence, Err(Error::Divergent(_))) as u8 as f64,
            1.0,
            0.0,
            Comparison::AbsWithin,
            Source::ExactSeries,
        ),
    ];
    Ok((criteria, info))
}

fn quadrant_commit(cfg: &ExperimentConfig) -> Outcome {
    steps(cfg)?;
    let s = walk_summaries(cfg, cfg.model, 0)?;
    let settled = s.iter().filter(|w| w.late_quadrant_changes == 0).count();
    let (changes, _) = mean_se(&s.iter().map(|w| w.quadrant_changes as f64).collect::<Vec<_>>());
    let mut info = Info::new();
    info.insert("mean_quadrant_changes".into(), json!(changes));
    let criteria = vec![Criterion::new(
        "settled-fraction",
        "fraction of runs without quadrant changes after n/2",
        frac(settled, s.len()),
        0.9,
        0.0,
        Comparison::AtLeast,
        Source::Calibration,
    )];
    Ok((criteria, info))
}

fn subordinator_marginal(cfg: &ExperimentConfig) -> Outcome {
    let i = excursions(cfg, MIN_RENEWALS)?;
    let norm = (i as f64).powi(2);
    let times: Vec<f64> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(cfg.seed, r);
            let mut rho = f64::INFINITY;
            // A run too long to represent is a legitimate +∞ sample.
            let _ = run_excursions(&cfg.model, cfg.start, i, u64::MAX, &mut rng, cfg.engine, |e| {
                if e.record.index == i {
                    rho = e.record.rho as f64
                }
            });
            rho / norm
        })
        .collect();
    let sim = EmpiricalDistribution::new(times)?;
    let oracle = lazy_oracle(i, ORACLE_REPLICAS.max(cfg.replicas), cfg.seed)?;
    let d = ks_distance(&sim, &oracle.samples);
    let mut info = Info::new();
    info.insert("median_simulated".into(), json!(sim.quantile(0.5)));
    info.insert("median_oracle".into(), json!(oracle.samples.quantile(0.5)));
    info.insert("oracle_table_tail_mass".into(), json!(oracle.table_tail_mass));
    info.insert(
        "two_sample_99pct_critical".into(),
        json!(1.63 * (1.0 / sim.len() as f64 + 1.0 / oracle.samples.len() as f64).sqrt()),
    );
    let criteria = vec![Criterion::new(
        "ks-distance",
        format!("KS distance between ρ_i/i² at i = {i} and the renewal-limit oracle"),
        d,
        0.0,
        0.05,
        Comparison::AbsWithin,
        Source::RenewalOracle,
    )];
    Ok((criteria, info))
}

fn eta_moment(cfg: &ExperimentConfig) -> Outcome {
    let model = cfg.model;
    let xs = [100i64, 400, 1600, 6400];
    let mut est = Vec::new();
    for (k, &x) in xs.iter().enumerate() {
        let offset = k as u64 * cfg.replicas;
        let gains: Vec<f64> = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(cfg.seed, offset + r);
                let mut stop = |_t: u64, s: LatticeState| {
                    if model.on_excursion_axis(s) {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                };
                let out = run_path(cfg.engine, &model, LatticeState::new(x, 1), u64::MAX, &mut rng, &mut stop)?;
                Ok((out.terminal.z_bar() - x) as f64)
            })
            .collect::<Result<_>>()?;
        est.push(mean_se(&gains));
    }
    let rows: Vec<Value> = xs
        .iter()
        .zip(&est)
        .map(|(x, (m, se))| json!({"x": x, "c3_estimate": m, "standard_error": se}))
        .collect();
    let mut info = Info::new();
    info.insert("estimates".into(), Value::Array(rows));
    // c3 is a limit constant and the corrections are O(x^{−1/2}), so the
    // sign is judged on the inverse-variance pooled estimate; the noisy
    // large-x estimates only have to agree with each other.
    let weight: f64 = est.iter().map(|(_, se)| se.powi(-2)).sum();
    let pooled = est.iter().map(|(m, se)| m * se.powi(-2)).sum::<f64>() / weight;
    let pooled_se = weight.sqrt().recip();
    info.insert("pooled".into(), json!({"c3_estimate": pooled, "standard_error": pooled_se}));
    let (top, top_se) = est[xs.len() - 1];
    let (prev, prev_se) = est[xs.len() - 2];
    let criteria = vec![
        Criterion::new(
            "c3-positive",
            "pooled estimate of c3 exceeds three standard errors",
            pooled,
            0.0,
            3.0 * pooled_se,
            Comparison::Above,
            Source::SamplingNoise,
        ),
        Criterion::new(
            "c3-stable",
            "estimates at the two largest x agree within three combined standard errors",
            top,
            prev,
            3.0 * (top_se * top_se + prev_se * prev_se).sqrt(),
            Comparison::AbsWithin,
            Source::SamplingNoise,
        ),
    ];
    Ok((criteria, info))
}
