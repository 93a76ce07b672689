//! Path simulation: a step-by-step reference engine and a jump engine that
//! is exact in law.
//!
//! The jump engine exploits that away from the axes every kernel is the
//! simple random walk. In the rotated coordinates `u = x + y`, `v = x − y`
//! one SRW step moves `u` and `v` by independent ±1, so `t` steps move each
//! by `2·Bin(t, ½) − t`. When `min(|x|, |y|) = d ≥ 2` no axis can be reached
//! within `d − 1` steps, so the walk jumps ahead by the largest power of two
//! not exceeding that. Near the axes it falls back to single steps.
//!
//! For the coupled walk a third engine draws whole cone phases at once. In
//! the open cone of that walk each step moves y with probability ½
//! whatever the position, so y is a lazy walk, while x at its own move
//! times is a simple random walk reflected by `0 → 1`, i.e. `|X + SRW|`.
//! A phase started at height 1 therefore ends after `K + M` steps with
//! `K` the first-passage time of a simple random walk from 1 and
//! `M ~ NegBin(K, ½)` the interleaved x-moves.
//!
//! All engines honour the same observer contract: between two consecutive
//! observations the walk stays strictly off every excursion axis. The step
//! engine observes every time; the others skip stretches in the cone (the
//! phase engine also skips visits to the coupled walk's reflecting wall).

use std::ops::ControlFlow;
use std::sync::OnceLock;

use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::analytics::first_passage::{central_binomial_ratio, central_binomial_ratio_real};
use crate::error::{Error, Result};
use crate::model::{LatticeState, ModelKind, ModelSpec};
use crate::rng::RngStream;

/// Streaming consumer of `(time, state)` pairs.
pub trait PathObserver {
    fn observe(&mut self, t: u64, s: LatticeState) -> ControlFlow<()>;
}

impl<F: FnMut(u64, LatticeState) -> ControlFlow<()>> PathObserver for F {
    fn observe(&mut self, t: u64, s: LatticeState) -> ControlFlow<()> {
        self(t, s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathOutcome {
    pub terminal: LatticeState,
    /// Time of the last observation.
    pub time: u64,
    /// Set when the observer stopped the run before the horizon.
    pub stopped_early: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// One kernel draw per time step; observer sees every state.
    Step,
    /// Interior stretches sampled as dyadic jumps.
    Jump,
    /// Whole cone phases of the coupled walk drawn from their exact law;
    /// identical to `Jump` for the other models.
    #[default]
    Phase,
}

/// Step-by-step simulation for `n_steps` steps (use `u64::MAX` for "until
/// the observer stops").
pub fn simulate_path<O: PathObserver + ?Sized>(
    model: &ModelSpec,
    start: LatticeState,
    n_steps: u64,
    rng: &mut RngStream,
    observer: &mut O,
) -> Result<PathOutcome> {
    model.validate()?;
    model.check_state(start)?;
    let mut s = start;
    if observer.observe(0, s).is_break() {
        return Ok(PathOutcome { terminal: s, time: 0, stopped_early: n_steps > 0 });
    }
    for t in 1..=n_steps {
        s = model.step_unchecked(s, rng.uniform());
        if observer.observe(t, s).is_break() {
            return Ok(PathOutcome { terminal: s, time: t, stopped_early: t < n_steps });
        }
    }
    Ok(PathOutcome { terminal: s, time: n_steps, stopped_early: false })
}

/// Largest jump is `2^MAX_JUMP_LOG2` steps.
const MAX_JUMP_LOG2: u32 = 40;

/// Jump-engine simulation; same law and observer contract as
/// [`simulate_path`], but consumes randomness differently.
pub fn simulate_path_jump<O: PathObserver + ?Sized>(
    model: &ModelSpec,
    start: LatticeState,
    n_steps: u64,
    rng: &mut RngStream,
    observer: &mut O,
) -> Result<PathOutcome> {
    model.validate()?;
    model.check_state(start)?;
    let mut s = start;
    if observer.observe(0, s).is_break() {
        return Ok(PathOutcome { terminal: s, time: 0, stopped_early: n_steps > 0 });
    }
    let mut t = 0u64;
    while t < n_steps {
        let d = s.x.unsigned_abs().min(s.y.unsigned_abs());
        if d >= 2 {
            let room = (d - 1).min(n_steps - t);
            let k = (63 - room.leading_zeros()).min(MAX_JUMP_LOG2);
            s = jump(s, k, rng);
            t += 1u64 << k;
        } else {
            s = model.step_unchecked(s, rng.uniform());
            t += 1;
        }
        if observer.observe(t, s).is_break() {
            return Ok(PathOutcome { terminal: s, time: t, stopped_early: t < n_steps });
        }
    }
    Ok(PathOutcome { terminal: s, time: t, stopped_early: false })
}

pub fn run_path<O: PathObserver + ?Sized>(
    engine: Engine,
    model: &ModelSpec,
    start: LatticeState,
    n_steps: u64,
    rng: &mut RngStream,
    observer: &mut O,
) -> Result<PathOutcome> {
    match engine {
        Engine::Step => simulate_path(model, start, n_steps, rng, observer),
        Engine::Jump => simulate_path_jump(model, start, n_steps, rng, observer),
        Engine::Phase if model.kind == ModelKind::CoupledHalfPlane => {
            simulate_path_phase(model, start, n_steps, rng, observer)
        }
        Engine::Phase => simulate_path_jump(model, start, n_steps, rng, observer),
    }
}

/// Phase engine for the coupled walk (see the module docs).
pub fn simulate_path_phase<O: PathObserver + ?Sized>(
    model: &ModelSpec,
    start: LatticeState,
    n_steps: u64,
    rng: &mut RngStream,
    observer: &mut O,
) -> Result<PathOutcome> {
    model.validate()?;
    model.check_state(start)?;
    if model.kind != ModelKind::CoupledHalfPlane {
        return Err(Error::Precondition("the phase engine only applies to the coupled walk".into()));
    }
    let mut s = start;
    if observer.observe(0, s).is_break() {
        return Ok(PathOutcome { terminal: s, time: 0, stopped_early: n_steps > 0 });
    }
    let mut t = 0u64;
    while t < n_steps {
        if s.y == 1 {
            let k = srw_first_passage_from_one(rng)?;
            let m = negbin_half(k, rng)?;
            let len = k.checked_add(m).ok_or_else(overflow)?;
            let end = t.checked_add(len).ok_or_else(overflow)?;
            if end <= n_steps {
                let dx = 2 * binomial_half_any(m, rng) as i128 - m as i128;
                let x = (s.x as i128 + dx).unsigned_abs();
                s = LatticeState::new(i64::try_from(x).map_err(|_| overflow())?, 0);
                t = end;
            } else {
                s = survive_until(model, s, n_steps - t, rng)?;
                t = n_steps;
            }
        } else if s.y >= 2 && s.x >= 2 {
            let d = s.x.unsigned_abs().min(s.y.unsigned_abs());
            let room = (d - 1).min(n_steps - t);
            let k = (63 - room.leading_zeros()).min(MAX_JUMP_LOG2);
            s = jump(s, k, rng);
            t += 1u64 << k;
        } else {
            s = model.step_unchecked(s, rng.uniform());
            t += 1;
        }
        if observer.observe(t, s).is_break() {
            return Ok(PathOutcome { terminal: s, time: t, stopped_early: t < n_steps });
        }
    }
    Ok(PathOutcome { terminal: s, time: t, stopped_early: false })
}

fn overflow() -> Error {
    Error::NonConvergent { what: "path time", terms: u64::MAX, bound: f64::INFINITY }
}

/// State after `r` steps from the cone state `s`, conditioned on the
/// horizontal axis not being reached in those steps (rejection).
fn survive_until(
    model: &ModelSpec,
    s: LatticeState,
    r: u64,
    rng: &mut RngStream,
) -> Result<LatticeState> {
    loop {
        let mut stop = |_t: u64, st: LatticeState| {
            if st.y == 0 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        };
        let out = simulate_path_jump(model, s, r, rng, &mut stop)?;
        if out.time == r && out.terminal.y != 0 {
            return Ok(out.terminal);
        }
    }
}

/// Tabulated `P(K > 2m−1) = C(2m, m)/4^m` for `m < FP_TABLE`.
const FP_TABLE: usize = 1 << 16;

fn srw_survival_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..FP_TABLE as u64).map(central_binomial_ratio).collect())
}

/// First-passage time to 0 of a simple random walk started at 1. It is odd,
/// `K = 2m − 1`, with `P(K > 2m − 1) = C(2m, m)/4^m`.
pub fn srw_first_passage_from_one(rng: &mut RngStream) -> Result<u64> {
    let u = rng.uniform_open();
    if u > 0.5 {
        return Ok(1);
    }
    let table = srw_survival_table();
    // Smallest m with P(K > 2m−1) < u.
    let m = table.partition_point(|&r| r >= u);
    let m = if m < table.len() {
        m as f64
    } else {
        let mut lo = (table.len() - 1) as f64;
        let mut hi = (1.0 / (std::f64::consts::PI * u * u)).max(lo + 1.0).ceil();
        while central_binomial_ratio_real(hi) >= u {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > (hi * 1e-15).max(1.0) {
            let mid = ((lo + hi) / 2.0).floor();
            if central_binomial_ratio_real(mid) < u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    if m >= 2f64.powi(62) {
        return Err(overflow());
    }
    Ok(2 * m as u64 - 1)
}

/// Failures before the `k`-th success of fair coin flips.
pub fn negbin_half(k: u64, rng: &mut RngStream) -> Result<u64> {
    use rand::RngCore;
    if k <= 32 {
        let mut total = 0u64;
        for _ in 0..k {
            loop {
                let w = rng.next_u64();
                total += w.trailing_zeros() as u64;
                if w != 0 {
                    break;
                }
            }
        }
        return Ok(total);
    }
    // NegBin(k, ½) is Poisson with a Gamma(k, 1) rate.
    let rate = Gamma::new(k as f64, 1.0).expect("valid gamma").sample(rng);
    let draw: f64 = Poisson::new(rate).map_err(|_| overflow())?.sample(rng);
    if draw >= 2f64.powi(62) {
        return Err(overflow());
    }
    Ok(draw as u64)
}

/// A draw from `Bin(m, ½)` for any `m`.
pub fn binomial_half_any(m: u64, rng: &mut RngStream) -> u64 {
    use rand::RngCore;
    if m <= 64 {
        let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        return (rng.next_u64() & mask).count_ones() as u64;
    }
    if m.is_power_of_two() && m.trailing_zeros() <= MAX_JUMP_LOG2 {
        return binomial_half(m.trailing_zeros(), rng);
    }
    Binomial::new(m, 0.5).expect("valid binomial").sample(rng)
}

/// Position after `2^k` simple-random-walk steps from `s`.
#[inline]
fn jump(s: LatticeState, k: u32, rng: &mut RngStream) -> LatticeState {
    let len = 1i64 << k;
    let du = 2 * binomial_half(k, rng) as i64 - len;
    let dv = 2 * binomial_half(k, rng) as i64 - len;
    LatticeState::new(s.x + (du + dv) / 2, s.y + (du - dv) / 2)
}

/// A draw from `Bin(2^k, ½)`.
#[inline]
pub(crate) fn binomial_half(k: u32, rng: &mut RngStream) -> u64 {
    use rand::RngCore;
    match k {
        0..=6 => {
            let bits = 1u32 << k;
            let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
            (rng.next_u64() & mask).count_ones() as u64
        }
        7..=9 => (0..(1u32 << (k - 6)))
            .map(|_| rng.next_u64().count_ones() as u64)
            .sum(),
        _ => binomial_table()[k as usize].sample(rng),
    }
}

fn binomial_table() -> &'static [Binomial] {
    static TABLE: OnceLock<Vec<Binomial>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_JUMP_LOG2)
            .map(|k| Binomial::new(1u64 << k, 0.5).expect("valid binomial parameters"))
            .collect()
    })
}
