//! Online extraction of axis excursions from a streaming path.
//!
//! `eta_i` is the first time after `rho_{i-1}` that the walk sits on an
//! excursion axis, `rho_i` the first time after `eta_i` that it is off
//! again (`rho_0 = 0`). The tracker keeps O(1) state and hands completed
//! records to the caller as they close.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::engine::{run_path, Engine, PathObserver};
use crate::error::{Error, Result};
use crate::model::{LatticeState, ModelKind, ModelSpec};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Horizontal,
    Vertical,
    NegHorizontal,
    NegVertical,
}

impl Axis {
    /// The half-axis containing `s`; the origin counts as horizontal.
    pub fn of(s: LatticeState) -> Axis {
        if s.y == 0 {
            if s.x >= 0 {
                Axis::Horizontal
            } else {
                Axis::NegHorizontal
            }
        } else if s.y > 0 {
            Axis::Vertical
        } else {
            Axis::NegVertical
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Axis::Horizontal | Axis::NegHorizontal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionRecord {
    pub index: u64,
    pub eta: u64,
    pub rho: u64,
    pub z_at_eta: i64,
    pub z_at_rho: i64,
    pub axis: Axis,
}

/// Running sums of the decomposition
/// `Z̄_{ρ_i} = Z̄_{ρ_0} + Σ (Z̄_{ρ_j} − Z̄_{η_j}) + Σ (Z̄_{η_j} − Z̄_{ρ_{j−1}})`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GainSums {
    /// Gains collected on the axes.
    pub axis_gain: i64,
    /// Changes accumulated inside the open cone.
    pub cone_change: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSummary {
    pub n: u64,
    pub terminal: LatticeState,
    pub z_bar_n: i64,
    pub z_min_n: i64,
    /// Completed excursions by time n.
    pub count_n: u64,
    /// Axis-to-axis moves up to n (the time spent sliding along an axis).
    pub axis_local_time: u64,
    /// `n − ρ_{N_n}`.
    pub renewal_age: u64,
    /// Last visit to the line other than the one of the final excursion;
    /// 0 if that line was never visited.
    pub commitment_time: u64,
    /// Both lines visited within the final tenth of the horizon.
    pub uncommitted: bool,
    /// Sign changes of the dominant coordinate between successive exits.
    pub quadrant_changes: u64,
    /// Those of the above that happened after `n/2`.
    pub late_quadrant_changes: u64,
    pub gains: GainSums,
}

#[derive(Clone, Copy, Debug)]
struct Open {
    eta: u64,
    z_at_eta: i64,
    axis: Axis,
}

/// Incremental excursion detector. Feed it every observation in time order.
#[derive(Clone, Debug)]
pub struct ExcursionTracker {
    model: ModelSpec,
    horizon: Option<u64>,
    prev_t: u64,
    prev_on: bool,
    state: LatticeState,
    open: Option<Open>,
    last_axis: Option<Axis>,
    completed: u64,
    last_rho: u64,
    z_last_rho: i64,
    z_rho0: i64,
    axis_local_time: u64,
    gains: GainSums,
    last_h_visit: Option<u64>,
    last_v_visit: Option<u64>,
    last_sign: Option<i64>,
    quadrant_changes: u64,
    late_quadrant_changes: u64,
}

impl ExcursionTracker {
    /// `horizon` is only used for the "late" quadrant-change split and the
    /// commitment window.
    pub fn new(model: ModelSpec, start: LatticeState, horizon: Option<u64>) -> Result<Self> {
        model.check_state(start)?;
        if model.on_excursion_axis(start) {
            return Err(Error::Precondition(format!(
                "excursion tracking must start off the axes, got {start}"
            )));
        }
        Ok(ExcursionTracker {
            model,
            horizon,
            prev_t: 0,
            prev_on: false,
            state: start,
            open: None,
            last_axis: None,
            completed: 0,
            last_rho: 0,
            z_last_rho: start.z_bar(),
            z_rho0: start.z_bar(),
            axis_local_time: 0,
            gains: GainSums::default(),
            last_h_visit: (start.y == 0).then_some(0),
            last_v_visit: (start.x == 0).then_some(0),
            last_sign: None,
            quadrant_changes: 0,
            late_quadrant_changes: 0,
        })
    }

    /// Process the observation at time `t`; returns the record closed by it.
    #[inline]
    pub fn push(&mut self, t: u64, s: LatticeState) -> Option<ExcursionRecord> {
        if t == 0 {
            return None;
        }
        if s.y == 0 {
            self.last_h_visit = Some(t);
        }
        if s.x == 0 {
            self.last_v_visit = Some(t);
        }
        let on = self.model.on_excursion_axis(s);
        let mut closed = None;
        match (self.prev_on, on) {
            (false, true) => {
                let axis = Axis::of(s);
                self.open = Some(Open { eta: t, z_at_eta: s.z_bar(), axis });
                self.last_axis = Some(axis);
            }
            (true, true) => {
                debug_assert_eq!(t, self.prev_t + 1);
                self.axis_local_time += 1;
            }
            (true, false) => {
                let open = self.open.take().expect("open excursion");
                self.completed += 1;
                let rec = ExcursionRecord {
                    index: self.completed,
                    eta: open.eta,
                    rho: t,
                    z_at_eta: open.z_at_eta,
                    z_at_rho: s.z_bar(),
                    axis: open.axis,
                };
                self.gains.axis_gain += rec.z_at_rho - rec.z_at_eta;
                self.gains.cone_change += rec.z_at_eta - self.z_last_rho;
                self.z_last_rho = rec.z_at_rho;
                self.last_rho = t;
                let sign = s.dominant_signed().signum();
                if let Some(prev) = self.last_sign {
                    if prev != sign {
                        self.quadrant_changes += 1;
                        if self.horizon.is_some_and(|n| 2 * t > n) {
                            self.late_quadrant_changes += 1;
                        }
                    }
                }
                self.last_sign = Some(sign);
                closed = Some(rec);
            }
            (false, false) => {}
        }
        self.prev_on = on;
        self.prev_t = t;
        self.state = s;
        closed
    }

    pub fn completed(&self) -> u64 {
        self.completed
    }

    pub fn gains(&self) -> GainSums {
        self.gains
    }

    /// `Z̄_{ρ_0}`, the dominant coordinate at the start.
    pub fn z_rho0(&self) -> i64 {
        self.z_rho0
    }

    pub fn state(&self) -> LatticeState {
        self.state
    }

    pub fn time(&self) -> u64 {
        self.prev_t
    }

    /// Summary at horizon `n`; the last observation must be at time `n`.
    pub fn summary(&self, n: u64) -> WalkSummary {
        debug_assert_eq!(self.prev_t, n);
        let final_horizontal = self.last_axis.map(Axis::is_horizontal);
        let commitment_time = match final_horizontal {
            Some(true) => self.last_v_visit.unwrap_or(0),
            Some(false) => self.last_h_visit.unwrap_or(0),
            None => 0,
        };
        let window_start = n - n / 10;
        let uncommitted = matches!(
            (self.last_h_visit, self.last_v_visit),
            (Some(h), Some(v)) if h >= window_start && v >= window_start
        ) && n > 0;
        WalkSummary {
            n,
            terminal: self.state,
            z_bar_n: self.state.z_bar(),
            z_min_n: self.state.z_min(),
            count_n: self.completed,
            axis_local_time: self.axis_local_time,
            renewal_age: n - self.last_rho,
            commitment_time,
            uncommitted,
            quadrant_changes: self.quadrant_changes,
            late_quadrant_changes: self.late_quadrant_changes,
            gains: self.gains,
        }
    }
}

impl PathObserver for ExcursionTracker {
    fn observe(&mut self, t: u64, s: LatticeState) -> ControlFlow<()> {
        self.push(t, s);
        ControlFlow::Continue(())
    }
}

/// Records of an explicit path given as the states at times 0, 1, 2, ...
pub fn track_excursions<I>(model: &ModelSpec, path: I) -> Result<Vec<ExcursionRecord>>
where
    I: IntoIterator<Item = LatticeState>,
{
    let mut it = path.into_iter();
    let start = it
        .next()
        .ok_or_else(|| Error::Precondition("empty path".into()))?;
    let mut tracker = ExcursionTracker::new(*model, start, None)?;
    let mut out = Vec::new();
    for (t, s) in it.enumerate() {
        if let Some(rec) = tracker.push(t as u64 + 1, s) {
            out.push(rec);
        }
    }
    Ok(out)
}

/// Simulate `n ≥ 1` steps and summarise.
pub fn summarize_walk(
    model: &ModelSpec,
    start: LatticeState,
    n: u64,
    rng: &mut RngStream,
    engine: Engine,
) -> Result<WalkSummary> {
    if n == 0 {
        return Err(Error::Precondition("summary needs a horizon n >= 1".into()));
    }
    let mut tracker = ExcursionTracker::new(*model, start, Some(n))?;
    run_path(engine, model, start, n, rng, &mut tracker)?;
    Ok(tracker.summary(n))
}

/// Summary of an explicit path (states at times 0..=n).
pub fn summarize<I>(model: &ModelSpec, path: I, n: u64) -> Result<WalkSummary>
where
    I: IntoIterator<Item = LatticeState>,
{
    if n == 0 {
        return Err(Error::Precondition("summary needs a horizon n >= 1".into()));
    }
    let mut it = path.into_iter();
    let start = it
        .next()
        .ok_or_else(|| Error::Precondition("empty path".into()))?;
    let mut tracker = ExcursionTracker::new(*model, start, Some(n))?;
    let mut t = 0;
    for s in it.take(n as usize) {
        t += 1;
        tracker.push(t, s);
    }
    if t != n {
        return Err(Error::Precondition(format!("path has {t} steps, horizon is {n}")));
    }
    Ok(tracker.summary(n))
}

/// What the excursion-count runner reports for each kept index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExcursionEvent {
    pub record: ExcursionRecord,
    pub gains: GainSums,
}

/// Run until `i_max` excursions have completed, calling `sink` for every
/// completed excursion. Fails if `max_time` passes first.
pub fn run_excursions<F>(
    model: &ModelSpec,
    start: LatticeState,
    i_max: u64,
    max_time: u64,
    rng: &mut RngStream,
    engine: Engine,
    mut sink: F,
) -> Result<ExcursionTracker>
where
    F: FnMut(&ExcursionEvent),
{
    let mut tracker = ExcursionTracker::new(*model, start, None)?;
    if i_max == 0 {
        return Ok(tracker);
    }
    let mut observer = |t: u64, s: LatticeState| {
        if let Some(record) = tracker.push(t, s) {
            sink(&ExcursionEvent { record, gains: tracker.gains() });
            if record.index >= i_max {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    };
    let out = run_path(engine, model, start, max_time, rng, &mut observer)?;
    if !out.stopped_early {
        return Err(Error::NonConvergent {
            what: "excursion run",
            terms: max_time,
            bound: f64::INFINITY,
        });
    }
    Ok(tracker)
}

/// Sample of the limit statistic `Z̄_{ρ_i} / i^{1/(1−α)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LlnStatistic {
    pub value: f64,
    /// False when alpha is outside (0, ½), where the law of large numbers
    /// is not claimed; the value is still computed.
    pub in_theorem_range: bool,
}

pub fn lln_statistic(record: &ExcursionRecord, alpha: f64) -> Result<LlnStatistic> {
    if record.index == 0 {
        return Err(Error::Precondition("excursion index starts at 1".into()));
    }
    let value = record.z_at_rho as f64 / (record.index as f64).powf(1.0 / (1.0 - alpha));
    Ok(LlnStatistic {
        value,
        in_theorem_range: alpha > 0.0 && alpha < 0.5,
    })
}

/// The two telescoping sums over the first `i` records.
pub fn excursion_gain_sums(records: &[ExcursionRecord], z_rho0: i64, i: usize) -> Result<GainSums> {
    if records.len() < i {
        return Err(Error::Precondition(format!(
            "need {i} records, have {}",
            records.len()
        )));
    }
    let mut sums = GainSums::default();
    let mut prev = z_rho0;
    for r in &records[..i] {
        sums.axis_gain += r.z_at_rho - r.z_at_eta;
        sums.cone_change += r.z_at_eta - prev;
        prev = r.z_at_rho;
    }
    Ok(sums)
}

/// Which excursion indices to keep: all up to `dense_until`, then a
/// geometric grid with the given ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinningSchedule {
    pub dense_until: u64,
    pub ratio: f64,
}

impl Default for ThinningSchedule {
    fn default() -> Self {
        ThinningSchedule { dense_until: 1000, ratio: 1.1 }
    }
}

impl ThinningSchedule {
    /// Kept indices in `1..=i_max`, always including `i_max`.
    pub fn indices(&self, i_max: u64) -> Vec<u64> {
        let mut out: Vec<u64> = (1..=self.dense_until.min(i_max)).collect();
        let ratio = self.ratio.max(1.0 + 1e-9);
        let mut x = self.dense_until.max(1) as f64;
        loop {
            x *= ratio;
            let i = x.round() as u64;
            if i > i_max {
                break;
            }
            if out.last().is_none_or(|&l| i > l) {
                out.push(i);
            }
        }
        if out.last() != Some(&i_max) && i_max > 0 {
            out.push(i_max);
        }
        out
    }
}

/// Whether the axis walk of `model` never retreats, so that an axis stay
/// entered at distance `i ≥ 1` gains exactly its length minus one.
pub fn has_monotone_axis(model: &ModelSpec) -> bool {
    matches!(
        model.kind,
        ModelKind::QuarterPlane | ModelKind::CoupledHalfPlane | ModelKind::FullPlane
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp() -> ModelSpec {
        ModelSpec::new(ModelKind::QuarterPlane, 0.25).unwrap()
    }

    fn st(x: i64, y: i64) -> LatticeState {
        LatticeState::new(x, y)
    }

    #[test]
    fn single_touch() {
        let recs = track_excursions(&qp(), [st(1, 1), st(1, 0), st(1, 1)]).unwrap();
        assert_eq!(
            recs,
            vec![ExcursionRecord {
                index: 1,
                eta: 1,
                rho: 2,
                z_at_eta: 1,
                z_at_rho: 1,
                axis: Axis::Horizontal
            }]
        );
        let sums = excursion_gain_sums(&recs, 1, 1).unwrap();
        assert_eq!(sums, GainSums { axis_gain: 0, cone_change: 0 });
    }

    #[test]
    fn slide_then_leave() {
        let recs =
            track_excursions(&qp(), [st(1, 1), st(1, 0), st(2, 0), st(2, 1)]).unwrap();
        assert_eq!(recs.len(), 1);
        let r = recs[0];
        assert_eq!((r.eta, r.rho), (1, 3));
        assert_eq!(r.z_at_rho - r.z_at_eta, 1);
        assert_eq!(r.z_at_rho - r.z_at_eta, (r.rho - r.eta - 1) as i64);
    }

    #[test]
    fn start_on_axis_is_rejected() {
        assert!(matches!(
            track_excursions(&qp(), [st(1, 0), st(2, 0)]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn count_at_horizon() {
        // rho_1 = 2, second excursion still open at n = 5.
        let path = [st(1, 1), st(1, 0), st(1, 1), st(1, 2), st(1, 1), st(0, 1)];
        let s = summarize(&qp(), path, 5).unwrap();
        assert_eq!(s.count_n, 1);
        assert_eq!(s.renewal_age, 3);
        assert_eq!(s.axis_local_time, 0);
        assert_eq!(s.commitment_time, 1);
    }

    #[test]
    fn coupled_walk_ignores_the_wall() {
        let m = ModelSpec::new(ModelKind::CoupledHalfPlane, 0.25).unwrap();
        let recs = track_excursions(&m, [st(1, 1), st(0, 1), st(0, 2), st(1, 2)]).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn thinning_indices() {
        let t = ThinningSchedule { dense_until: 5, ratio: 2.0 };
        assert_eq!(t.indices(50), vec![1, 2, 3, 4, 5, 10, 20, 40, 50]);
        assert_eq!(t.indices(3), vec![1, 2, 3]);
        assert_eq!(ThinningSchedule::default().indices(1000).len(), 1000);
    }

    #[test]
    fn lln_statistic_trivial() {
        let r = ExcursionRecord {
            index: 1,
            eta: 1,
            rho: 2,
            z_at_eta: 1,
            z_at_rho: 1,
            axis: Axis::Horizontal,
        };
        let s = lln_statistic(&r, 0.2).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.in_theorem_range);
        assert!(!lln_statistic(&r, 0.7).unwrap().in_theorem_range);
    }
}
