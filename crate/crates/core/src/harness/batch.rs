//! Replica batches written as `results.csv` plus a JSONL manifest.
//!
//! Replicas run in parallel in chunks; the calling thread writes each chunk
//! in replica order and then appends a checkpoint line carrying the CSV
//! length. A rerun with the same configuration truncates the CSV to the last
//! checkpoint and carries on, so interrupted and uninterrupted runs end with
//! the same bytes.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Horizon};
use crate::error::{Error, Result};
use crate::excursion::{run_excursions, summarize_walk};
use crate::rng::{RngStream, ALGORITHM_ID};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const CSV_HEADER: &str = "replica,observable,index,value\n";
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Replicas per checkpoint.
const CHUNK: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub replica: u64,
    pub observable: &'static str,
    pub index: u64,
    pub value: f64,
}

impl ResultRow {
    fn new(replica: u64, observable: &'static str, index: u64, value: f64) -> Self {
        ResultRow { replica, observable, index, value }
    }

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{}\n", self.replica, self.observable, self.index, self.value)
    }
}

/// Rows of one replica. A failed replica yields a single `failed` row.
pub fn replica_rows(config: &ExperimentConfig, replica: u64) -> Vec<ResultRow> {
    match try_replica_rows(config, replica) {
        Ok(rows) => rows,
        Err(_) => vec![ResultRow::new(replica, "failed", 0, 1.0)],
    }
}

fn try_replica_rows(config: &ExperimentConfig, r: u64) -> Result<Vec<ResultRow>> {
    let mut rng = RngStream::new(config.seed, r);
    match config.horizon {
        Horizon::Steps(0) => Ok(vec![ResultRow::new(r, "z_bar", 0, config.start.z_bar() as f64)]),
        Horizon::Steps(n) => {
            let s = summarize_walk(&config.model, config.start, n, &mut rng, config.engine)?;
            let fields: [(&'static str, f64); 13] = [
                ("z_bar", s.z_bar_n as f64),
                ("z_min", s.z_min_n as f64),
                ("terminal_x", s.terminal.x as f64),
                ("terminal_y", s.terminal.y as f64),
                ("excursions", s.count_n as f64),
                ("axis_local_time", s.axis_local_time as f64),
                ("renewal_age", s.renewal_age as f64),
                ("commitment_time", s.commitment_time as f64),
                ("uncommitted", s.uncommitted as u8 as f64),
                ("quadrant_changes", s.quadrant_changes as f64),
                ("late_quadrant_changes", s.late_quadrant_changes as f64),
                ("axis_gain", s.gains.axis_gain as f64),
                ("cone_change", s.gains.cone_change as f64),
            ];
            Ok(fields.iter().map(|&(name, v)| ResultRow::new(r, name, n, v)).collect())
        }
        Horizon::Excursions(i_max) => {
            let keep = config.thinning.indices(i_max);
            let mut next = 0usize;
            let mut rows = Vec::with_capacity(keep.len() * 5);
            run_excursions(&config.model, config.start, i_max, u64::MAX, &mut rng, config.engine, |e| {
                if next < keep.len() && e.record.index == keep[next] {
                    next += 1;
                    let i = e.record.index;
                    rows.push(ResultRow::new(r, "eta", i, e.record.eta as f64));
                    rows.push(ResultRow::new(r, "rho", i, e.record.rho as f64));
                    rows.push(ResultRow::new(r, "z_eta", i, e.record.z_at_eta as f64));
                    rows.push(ResultRow::new(r, "z_rho", i, e.record.z_at_rho as f64));
                    rows.push(ResultRow::new(r, "axis_gain", i, e.gains.axis_gain as f64));
                    rows.push(ResultRow::new(r, "cone_change", i, e.gains.cone_change as f64));
                }
            })?;
            Ok(rows)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ManifestHeader {
    config_hash: String,
    prng: String,
    version: String,
    /// Seconds since the Unix epoch.
    started: u64,
    config: ExperimentConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    replicas_done: u64,
    rows: u64,
    bytes: u64,
    #[serde(default)]
    complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchOutcome {
    pub results: PathBuf,
    pub manifest: PathBuf,
    pub config_hash: String,
    pub rows: u64,
    pub failed_replicas: u64,
    /// Replicas already on disk when this run started.
    pub resumed_from: u64,
    pub complete: bool,
}

/// Run (or resume) the batch described by `config` in its `out` directory.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchOutcome> {
    run_batch_until(config, None)
}

/// As [`run_batch`], but stop after the first checkpoint at or beyond
/// `stop_after` replicas, leaving a resumable partial batch.
pub fn run_batch_until(config: &ExperimentConfig, stop_after: Option<u64>) -> Result<BatchOutcome> {
    config.validate()?;
    if config.model.on_excursion_axis(config.start) && config.horizon != Horizon::Steps(0) {
        return Err(Error::Config(format!("start {} lies on an axis; batches start inside the cone", config.start)));
    }
    let dir = config
        .out
        .clone()
        .ok_or_else(|| Error::Config("batch runs need an output directory (--out)".into()))?;
    std::fs::create_dir_all(&dir)?;
    let results = dir.join(RESULTS_FILE);
    let manifest_path = dir.join(MANIFEST_FILE);
    let hash = config.hash();

    let previous = read_manifest(&manifest_path, &hash)?;
    let mut state = previous.unwrap_or_default();
    let resumed_from = state.replicas_done;

    let mut csv = OpenOptions::new().create(true).write(true).truncate(false).open(&results)?;
    let mut manifest = OpenOptions::new().create(true).append(true).open(&manifest_path)?;
    if previous.is_none() {
        manifest.set_len(0)?;
        csv.set_len(0)?;
        let header = ManifestHeader {
            config_hash: hash.clone(),
            prng: ALGORITHM_ID.to_string(),
            version: CODE_VERSION.to_string(),
            started: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            config: config.clone(),
        };
        writeln!(manifest, "{}", serde_json::to_string(&header)?)?;
        csv.write_all(CSV_HEADER.as_bytes())?;
        state.bytes = CSV_HEADER.len() as u64;
        csv.flush()?;
    } else {
        // Drop anything written after the last checkpoint.
        csv.set_len(state.bytes)?;
    }
    csv.seek(SeekFrom::Start(state.bytes))?;
    let mut csv = BufWriter::new(csv);

    let mut failed = 0u64;
    while !state.complete {
        if stop_after.is_some_and(|s| state.replicas_done >= s) {
            break;
        }
        let lo = state.replicas_done;
        let hi = (lo + CHUNK).min(config.replicas);
        let chunk: Vec<Vec<ResultRow>> = (lo..hi).into_par_iter().map(|r| replica_rows(config, r)).collect();
        for rows in &chunk {
            if rows.len() == 1 && rows[0].observable == "failed" {
                failed += 1;
            }
            for row in rows {
                let line = row.to_csv();
                csv.write_all(line.as_bytes())?;
                state.bytes += line.len() as u64;
                state.rows += 1;
            }
        }
        csv.flush()?;
        state.replicas_done = hi;
        state.complete = hi == config.replicas;
        writeln!(manifest, "{}", serde_json::to_string(&state)?)?;
        manifest.flush()?;
    }

    Ok(BatchOutcome {
        results,
        manifest: manifest_path,
        config_hash: hash,
        rows: state.rows,
        failed_replicas: failed,
        resumed_from,
        complete: state.complete,
    })
}

/// Last checkpoint of an existing manifest for the same configuration;
/// `None` when there is nothing to resume.
fn read_manifest(path: &Path, hash: &str) -> Result<Option<Checkpoint>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(file).lines();
    let header: ManifestHeader = match lines.next() {
        Some(line) => match serde_json::from_str(&line?) {
            Ok(h) => h,
            Err(_) => return Ok(None),
        },
        None => return Ok(None),
    };
    if header.config_hash != hash {
        return Err(Error::Config(format!(
            "{} belongs to a different configuration (hash {}); choose another output directory",
            path.display(),
            header.config_hash
        )));
    }
    let mut last = Checkpoint::default();
    let mut seen = false;
    for line in lines {
        // A torn final line is ignored; the previous checkpoint still holds.
        if let Ok(c) = serde_json::from_str::<Checkpoint>(&line?) {
            last = c;
            seen = true;
        }
    }
    if !seen {
        return Ok(None);
    }
    Ok(Some(last))
}
