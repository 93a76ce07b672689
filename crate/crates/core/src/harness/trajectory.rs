//! Sampled positions of a single run, for plotting.

use std::io::Write;
use std::ops::ControlFlow;

use super::config::{ExperimentConfig, Horizon};
use crate::engine::simulate_path;
use crate::error::{Error, Result};
use crate::model::LatticeState;
use crate::rng::RngStream;

pub const TRAJECTORY_HEADER: &str = "t,x,y\n";

/// Write `t,x,y` rows for replica 0 at every multiple of `stride` and at the
/// final time. Returns the number of data rows.
pub fn trajectory_dump<W: Write>(config: &ExperimentConfig, stride: u64, out: &mut W) -> Result<u64> {
    config.validate()?;
    if stride == 0 {
        return Err(Error::Config("stride must be at least 1".into()));
    }
    let n = match config.horizon {
        Horizon::Steps(n) => n,
        Horizon::Excursions(_) => {
            return Err(Error::Config("trajectory dumps need a step horizon (--n)".into()))
        }
    };
    let mut rng = RngStream::new(config.seed, 0);
    out.write_all(TRAJECTORY_HEADER.as_bytes())?;
    let mut rows = 0u64;
    let mut io_error = None;
    let mut observer = |t: u64, s: LatticeState| {
        if t % stride == 0 || t == n {
            if let Err(e) = writeln!(out, "{t},{},{}", s.x, s.y) {
                io_error = Some(e);
                return ControlFlow::Break(());
            }
            rows += 1;
        }
        ControlFlow::Continue(())
    };
    simulate_path(&config.model, config.start, n, &mut rng, &mut observer)?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    out.flush()?;
    Ok(rows)
}
