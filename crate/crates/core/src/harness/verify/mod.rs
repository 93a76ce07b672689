//! Named verification targets.
//!
//! Each target runs the smallest batch that can resolve its claim, computes
//! an estimator, and compares it with a prediction from [`crate::analytics`]
//! under a tolerance fixed here. Tolerances are generous because the claims
//! are limit statements checked at finite size; the rationale sits next to
//! each one in [`targets`].

mod cache;
mod targets;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use super::config::{ExperimentConfig, Horizon, Overrides};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::excursion::ThinningSchedule;
use crate::model::{LatticeState, ModelKind, ModelSpec};

pub use cache::clear_cache;

/// How a measured value is judged against its expected value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|measured − expected| ≤ tolerance`.
    AbsWithin,
    /// `|measured/expected − 1| ≤ tolerance`.
    RelWithin,
    /// `measured ≥ expected − tolerance`.
    AtLeast,
    /// `measured ≤ expected + tolerance`.
    AtMost,
    /// `measured < expected` strictly.
    Below,
    /// `measured > expected + tolerance`.
    Above,
}

impl Comparison {
    pub fn holds(self, measured: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Comparison::AbsWithin => (measured - expected).abs() <= tolerance,
            Comparison::RelWithin => (measured / expected - 1.0).abs() <= tolerance,
            Comparison::AtLeast => measured >= expected - tolerance,
            Comparison::AtMost => measured <= expected + tolerance,
            Comparison::Below => measured < expected,
            Comparison::Above => measured > expected + tolerance,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Comparison::AbsWithin => "|measured - expected| <= tolerance",
            Comparison::RelWithin => "|measured / expected - 1| <= tolerance",
            Comparison::AtLeast => "measured >= expected - tolerance",
            Comparison::AtMost => "measured <= expected + tolerance",
            Comparison::Below => "measured < expected",
            Comparison::Above => "measured > expected + tolerance",
        }
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// A closed-form constant or limit.
    ClosedForm,
    /// A certified series summation.
    ExactSeries,
    /// A Monte Carlo oracle built from an exact law.
    RenewalOracle,
    /// An identity that holds path by path.
    ExactIdentity,
    /// A threshold fixed by a calibration run.
    Calibration,
    /// A bound from the two-sample sampling noise of the estimator.
    SamplingNoise,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub description: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub rule: &'static str,
    pub expected_source: Source,
    pub passed: bool,
}

impl Criterion {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        comparison: Comparison,
        expected_source: Source,
    ) -> Self {
        Criterion {
            name: name.into(),
            description: description.into(),
            measured,
            expected,
            tolerance,
            comparison,
            rule: comparison.describe(),
            expected_source,
            passed: comparison.holds(measured, expected, tolerance),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub target: String,
    /// The claim being checked, in plain words.
    pub claim: String,
    pub version: String,
    /// Resolved inputs; rerunning with these reproduces the report.
    pub parameters: Value,
    pub criteria: Vec<Criterion>,
    /// Diagnostics that are reported but not judged.
    pub info: BTreeMap<String, Value>,
    pub passed: bool,
}

impl VerdictReport {
    fn new(target: &TargetInfo, parameters: Value, criteria: Vec<Criterion>, info: BTreeMap<String, Value>) -> Self {
        let passed = !criteria.is_empty() && criteria.iter().all(|c| c.passed);
        VerdictReport {
            target: target.id.to_string(),
            claim: target.claim.to_string(),
            version: super::batch::CODE_VERSION.to_string(),
            parameters,
            criteria,
            info,
            passed,
        }
    }

    /// One line per criterion, for terminals.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} [{}]: {}\n",
            self.target,
            if self.passed { "PASS" } else { "FAIL" },
            self.claim
        );
        for c in &self.criteria {
            out.push_str(&format!(
                "  {} {}: measured {:.6} expected {:.6} tol {:.4} ({}; {:?})\n",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.measured,
                c.expected,
                c.tolerance,
                c.rule,
                c.expected_source
            ));
        }
        out
    }
}

/// Registry entry.
#[derive(Clone, Debug)]
pub struct TargetInfo {
    pub id: &'static str,
    pub claim: &'static str,
    /// Fewest replicas that can resolve the claim.
    pub min_replicas: u64,
    pub defaults: ExperimentConfig,
}

fn defaults(kind: ModelKind, alpha: f64, horizon: Horizon, replicas: u64) -> ExperimentConfig {
    ExperimentConfig {
        model: ModelSpec { kind, alpha },
        start: LatticeState::ORIGIN_DIAGONAL,
        horizon,
        replicas,
        seed: 20_240_601,
        thinning: ThinningSchedule::default(),
        engine: Engine::Phase,
        out: None,
        target: None,
    }
}

pub const TARGET_IDS: [&str; 15] = [
    "lln",
    "mean-asymptotic",
    "recurrence-sandwich",
    "nn-left-tail",
    "theorem-left-tail",
    "theorem-right-tail",
    "arcsine",
    "commitment",
    "coupling-ks",
    "variance-scaling",
    "ballistic",
    "quadrant-commit",
    "subordinator-marginal",
    "submartingale",
    "eta-moment",
];

pub fn target_info(id: &str) -> Result<TargetInfo> {
    use Horizon::{Excursions, Steps};
    use ModelKind::*;
    let (claim, min_replicas, defaults) = match id {
        "lln" => (
            "Z̄ at the i-th axis exit, divided by i^{1/(1−α)}, converges to c1 = (2(1−α))^{1/(1−α)}",
            100,
            defaults(QuarterPlane, 0.2, Excursions(10_000), 1000),
        ),
        "mean-asymptotic" => (
            "the exact mean of Z̄ at the end of an axis stay from (x, 0) is x + 2x^α − 3/2 − x^{−α}/6 up to O(x^{−2α})",
            1,
            defaults(QuarterPlane, 0.3, Steps(1), 1),
        ),
        "recurrence-sandwich" => (
            "the mean m_i of Z̄ at the i-th exit satisfies m_i − m_{i−1} − 2 m_{i−1}^α = constant + o(1)",
            100,
            defaults(QuarterPlane, 0.2, Excursions(10_000), 1000),
        ),
        "nn-left-tail" => (
            "for the coupled walk P(N_n ≤ u√n) behaves like a constant times u^{1/2} for small u",
            1000,
            defaults(CoupledHalfPlane, 0.25, Steps(100_000), 10_000),
        ),
        "theorem-left-tail" => (
            "P(Z̄_n ≤ a n^{1/(2(1−α))}) behaves like c2 (a/c1)^{(1−α)/2} for small a",
            10_000,
            defaults(QuarterPlane, 0.25, Steps(100_000), 100_000),
        ),
        "theorem-right-tail" => (
            "P(Z̄_n ≥ a^{−1} n^{1/(2(1−α))}) converges to the renewal-limit probability that N_n reaches (a c1)^{α−1} √n",
            1000,
            defaults(QuarterPlane, 0.25, Steps(100_000), 10_000),
        ),
        "arcsine" => (
            "the age n − ρ_{N_n} of the current excursion of the coupled walk, over n, follows the arcsine law",
            1000,
            defaults(CoupledHalfPlane, 0.25, Steps(100_000), 10_000),
        ),
        "commitment" => (
            "the walk stops visiting one of the two axes well before time n",
            100,
            defaults(QuarterPlane, 0.25, Steps(1_000_000), 1000),
        ),
        "coupling-ks" => (
            "the quarter-plane walk and the coupled walk have the same law of Z̄_n at large n",
            1000,
            defaults(QuarterPlane, 0.25, Steps(1_000_000), 10_000),
        ),
        "variance-scaling" => (
            "Var of the summed axis gains up to exit i grows more slowly than i^{(2α+2)/(1−α)}",
            100,
            defaults(QuarterPlane, 0.2, Excursions(10_000), 1000),
        ),
        "ballistic" => (
            "for α > 1 the walk eventually slides along one axis: Z̄_n/n → 1; at α = 1 the mean axis stay is infinite",
            10,
            defaults(QuarterPlane, 1.5, Steps(1_000_000), 100),
        ),
        "quadrant-commit" => (
            "the full-plane walk settles in one quadrant: no quadrant changes in the second half of the run",
            100,
            defaults(FullPlane, 0.2, Steps(1_000_000), 1000),
        ),
        "subordinator-marginal" => (
            "ρ_i/i² of the coupled walk has the law of the ½-stable renewal limit built from the lazy first-passage law",
            1000,
            defaults(CoupledHalfPlane, 0.25, Excursions(1000), 10_000),
        ),
        "submartingale" => (
            "Z̄ at successive axis exits is a sub-martingale: E(Z̄_{ρ_i} | Z̄_{ρ_{i−1}} = x) ≥ x",
            100,
            defaults(QuarterPlane, 0.2, Excursions(10_000), 1000),
        ),
        "eta-moment" => (
            "from (x, 1) the mean of Z̄ at the next axis hit is x + c3 + O(x^{−1/2}) with c3 > 0",
            10_000,
            defaults(QuarterPlane, 0.25, Steps(1), 100_000),
        ),
        other => return Err(Error::UnknownTarget(other.to_string())),
    };
    Ok(TargetInfo { id: TARGET_IDS.iter().find(|t| **t == id).copied().unwrap(), claim, min_replicas, defaults })
}

pub fn list_targets() -> Vec<TargetInfo> {
    TARGET_IDS.iter().map(|id| target_info(id).expect("registered")).collect()
}

/// Run target `id` with `overrides` applied to its defaults.
pub fn verify(id: &str, overrides: &Overrides) -> Result<VerdictReport> {
    let info = target_info(id)?;
    let config = overrides.apply(&info.defaults)?;
    if config.replicas < info.min_replicas {
        return Err(Error::UnderPowered {
            target: id.to_string(),
            what: "replicas",
            got: config.replicas,
            need: info.min_replicas,
        });
    }
    let parameters = serde_json::to_value(&config)?;
    let (criteria, notes) = targets::run(&info, &config, overrides)?;
    Ok(VerdictReport::new(&info, parameters, criteria, notes))
}
