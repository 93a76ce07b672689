//! Experiment configuration: a JSON file and command-line flags, both
//! expressed as [`Overrides`] layered on top of defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::excursion::ThinningSchedule;
use crate::model::{LatticeState, ModelKind, ModelSpec};

/// Environment variable that wins over `--threads`.
pub const THREADS_ENV: &str = "AXISWALK_THREADS";

/// Fixed time horizon or number of completed excursions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Steps(u64),
    Excursions(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub start: LatticeState,
    pub horizon: Horizon,
    pub replicas: u64,
    pub seed: u64,
    pub thinning: ThinningSchedule,
    pub engine: Engine,
    /// Output directory for `results.csv` and `manifest.jsonl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelSpec { kind: ModelKind::QuarterPlane, alpha: 0.25 },
            start: LatticeState::ORIGIN_DIAGONAL,
            horizon: Horizon::Steps(10_000),
            replicas: 1,
            seed: 0,
            thinning: ThinningSchedule::default(),
            engine: Engine::default(),
            out: None,
            target: None,
        }
    }
}

/// Partial configuration. Every field left `None` keeps the base value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub model: Option<ModelKind>,
    pub alpha: Option<f64>,
    pub start: Option<LatticeState>,
    pub n: Option<u64>,
    pub excursions: Option<u64>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub thinning: Option<ThinningSchedule>,
    pub engine: Option<Engine>,
    pub out: Option<PathBuf>,
    pub target: Option<String>,
    pub stride: Option<u64>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `top` replaced.
    pub fn merged(mut self, top: &Overrides) -> Overrides {
        macro_rules! take {
            ($($f:ident),*) => { $( if top.$f.is_some() { self.$f = top.$f.clone(); } )* };
        }
        take!(model, alpha, start, n, excursions, replicas, seed, thinning, engine, out, target, stride, threads);
        self
    }

    pub fn apply(&self, base: &ExperimentConfig) -> Result<ExperimentConfig> {
        if self.n.is_some() && self.excursions.is_some() {
            return Err(Error::Config("give either n or excursions, not both".into()));
        }
        let mut c = base.clone();
        if let Some(k) = self.model {
            c.model.kind = k;
        }
        if let Some(a) = self.alpha {
            c.model.alpha = a;
        }
        if let Some(s) = self.start {
            c.start = s;
        }
        if let Some(n) = self.n {
            c.horizon = Horizon::Steps(n);
        }
        if let Some(i) = self.excursions {
            c.horizon = Horizon::Excursions(i);
        }
        if let Some(r) = self.replicas {
            c.replicas = r;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.thinning {
            c.thinning = t;
        }
        if let Some(e) = self.engine {
            c.engine = e;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if self.target.is_some() {
            c.target = self.target.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.model.check_state(self.start)?;
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if let Horizon::Excursions(0) = self.horizon {
            return Err(Error::Config("excursion count must be at least 1".into()));
        }
        if !(self.thinning.ratio > 1.0) {
            return Err(Error::Config("thinning ratio must exceed 1".into()));
        }
        if let Some(t) = &self.target {
            super::verify::target_info(t)?;
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of every field that affects results.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig { out: None, target: None, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Worker count: the environment variable, then the flag, then the machine.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => match flag {
            Some(0) => Err(Error::Config("--threads must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        },
    }
}
