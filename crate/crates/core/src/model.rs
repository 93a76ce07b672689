//! Walk variants and their exact one-step kernels.
//!
//! Every kernel is expressed over the four nearest neighbours in the fixed
//! order (+x, −x, +y, −y). Sampling is inverse-CDF over that order with a
//! single uniform per step, which is what makes runs reproducible across
//! machines and thread counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// The base walk: pushed away from the origin along both half-axes.
    QuarterPlane,
    /// Push on the horizontal axis only; the vertical axis reflects.
    CoupledHalfPlane,
    /// The base rule copied into all four quadrants.
    FullPlane,
    /// Base walk that may also step back towards the origin on an axis.
    BackstepQuarter,
    /// Simple random walk reflected on both axes, no push.
    ReflectedSrwQuarter,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::QuarterPlane,
        ModelKind::CoupledHalfPlane,
        ModelKind::FullPlane,
        ModelKind::BackstepQuarter,
        ModelKind::ReflectedSrwQuarter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::QuarterPlane => "quarter-plane",
            ModelKind::CoupledHalfPlane => "coupled-half-plane",
            ModelKind::FullPlane => "full-plane",
            ModelKind::BackstepQuarter => "backstep-quarter",
            ModelKind::ReflectedSrwQuarter => "reflected-srw-quarter",
        }
    }

    /// True for every kind confined to the closed first quadrant.
    pub fn is_quarter(self) -> bool {
        !matches!(self, ModelKind::FullPlane)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        let kind = match key.as_str() {
            "quarter-plane" | "quarter" | "qp" | "z" => ModelKind::QuarterPlane,
            "coupled-half-plane" | "coupled" | "zz" => ModelKind::CoupledHalfPlane,
            "full-plane" | "full" => ModelKind::FullPlane,
            "backstep-quarter" | "backstep" => ModelKind::BackstepQuarter,
            "reflected-srw-quarter" | "reflected-srw" | "srw" => ModelKind::ReflectedSrwQuarter,
            _ => return Err(Error::Config(format!("unknown model `{s}`"))),
        };
        Ok(kind)
    }
}

/// Successor directions in sampling order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Direction {
    pub const ORDER: [Direction; 4] = [
        Direction::PlusX,
        Direction::MinusX,
        Direction::PlusY,
        Direction::MinusY,
    ];

    fn offset(self) -> (i64, i64) {
        match self {
            Direction::PlusX => (1, 0),
            Direction::MinusX => (-1, 0),
            Direction::PlusY => (0, 1),
            Direction::MinusY => (0, -1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeState {
    pub x: i64,
    pub y: i64,
}

impl LatticeState {
    pub const fn new(x: i64, y: i64) -> Self {
        LatticeState { x, y }
    }

    /// The conventional starting point.
    pub const ORIGIN_DIAGONAL: LatticeState = LatticeState::new(1, 1);

    /// Dominant coordinate `max(|x|, |y|)`.
    pub fn z_bar(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    /// Smaller coordinate `min(|x|, |y|)`; equals `min(x, y)` on the quarter plane.
    pub fn z_min(self) -> i64 {
        self.x.abs().min(self.y.abs())
    }

    /// The signed dominant coordinate (ties go to x).
    pub fn dominant_signed(self) -> i64 {
        if self.x.abs() >= self.y.abs() {
            self.x
        } else {
            self.y
        }
    }

    pub fn moved(self, dir: Direction) -> Self {
        let (dx, dy) = dir.offset();
        LatticeState::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for LatticeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Repulsion exponent. Ignored by [`ModelKind::ReflectedSrwQuarter`].
    pub alpha: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, alpha: f64) -> Result<Self> {
        let spec = ModelSpec { kind, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ModelKind::ReflectedSrwQuarter {
            return Ok(());
        }
        if !(self.alpha > 0.0 && self.alpha <= 4.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    pub fn check_state(&self, s: LatticeState) -> Result<()> {
        if self.kind.is_quarter() && (s.x < 0 || s.y < 0) {
            return Err(Error::InvalidState {
                kind: self.kind,
                x: s.x,
                y: s.y,
            });
        }
        Ok(())
    }

    /// Off-axis probability `1/(2 i^alpha)` at distance `i >= 1`.
    #[inline]
    pub fn push(&self, i: i64) -> f64 {
        debug_assert!(i >= 1);
        if i == 1 {
            0.5
        } else {
            0.5 * (i as f64).powf(-self.alpha)
        }
    }

    /// Whether `s` lies on a line that starts or ends an excursion.
    ///
    /// For the coupled walk only the horizontal axis counts: its vertical
    /// axis is a reflecting wall, not a place the walk is pushed along.
    #[inline]
    pub fn on_excursion_axis(&self, s: LatticeState) -> bool {
        match self.kind {
            ModelKind::CoupledHalfPlane => s.y == 0,
            _ => s.x == 0 || s.y == 0,
        }
    }

    /// Kernel probabilities in the order (+x, −x, +y, −y).
    pub fn probabilities(&self, s: LatticeState) -> Result<[f64; 4]> {
        self.check_state(s)?;
        Ok(self.probabilities_unchecked(s))
    }

    pub(crate) fn probabilities_unchecked(&self, s: LatticeState) -> [f64; 4] {
        const Q: f64 = 0.25;
        let (x, y) = (s.x, s.y);
        if x != 0 && y != 0 {
            return [Q; 4];
        }
        match self.kind {
            ModelKind::QuarterPlane => match (x, y) {
                (0, 0) => [0.5, 0.0, 0.5, 0.0],
                (i, 0) => {
                    let q = self.push(i);
                    [1.0 - q, 0.0, q, 0.0]
                }
                (0, j) => {
                    let q = self.push(j);
                    [q, 0.0, 1.0 - q, 0.0]
                }
                _ => unreachable!(),
            },
            ModelKind::CoupledHalfPlane => match (x, y) {
                (0, 0) => [0.5, 0.0, 0.5, 0.0],
                (i, 0) => {
                    let q = self.push(i);
                    [1.0 - q, 0.0, q, 0.0]
                }
                (0, _) => [0.5, 0.0, 0.25, 0.25],
                _ => unreachable!(),
            },
            ModelKind::BackstepQuarter => match (x, y) {
                (0, 0) => [0.5, 0.0, 0.5, 0.0],
                (i, 0) => {
                    let p = (i as f64).powf(-self.alpha);
                    let (back, off) = (p / 3.0, p / 2.0);
                    [1.0 - back - off, back, off, 0.0]
                }
                (0, j) => {
                    let p = (j as f64).powf(-self.alpha);
                    let (back, off) = (p / 3.0, p / 2.0);
                    [off, 0.0, 1.0 - back - off, back]
                }
                _ => unreachable!(),
            },
            ModelKind::ReflectedSrwQuarter => match (x, y) {
                (0, 0) => [0.5, 0.0, 0.5, 0.0],
                (_, 0) => [0.25, 0.25, 0.5, 0.0],
                (0, _) => [0.5, 0.0, 0.25, 0.25],
                _ => unreachable!(),
            },
            ModelKind::FullPlane => match (x, y) {
                (0, 0) => [Q; 4],
                (i, 0) => {
                    let q = self.push(i.abs());
                    let out = 1.0 - q;
                    if i > 0 {
                        [out, 0.0, q / 2.0, q / 2.0]
                    } else {
                        [0.0, out, q / 2.0, q / 2.0]
                    }
                }
                (0, j) => {
                    let q = self.push(j.abs());
                    let out = 1.0 - q;
                    if j > 0 {
                        [q / 2.0, q / 2.0, out, 0.0]
                    } else {
                        [q / 2.0, q / 2.0, 0.0, out]
                    }
                }
                _ => unreachable!(),
            },
        }
    }

    /// Successors with positive probability, in sampling order.
    pub fn transition_distribution(&self, s: LatticeState) -> Result<Vec<(LatticeState, f64)>> {
        let probs = self.probabilities(s)?;
        Ok(Direction::ORDER
            .iter()
            .zip(probs)
            .filter(|(_, p)| *p > 0.0)
            .map(|(d, p)| (s.moved(*d), p))
            .collect())
    }

    /// One inverse-CDF step driven by the uniform `u` in `[0, 1)`.
    pub fn step_with(&self, s: LatticeState, u: f64) -> Result<LatticeState> {
        self.check_state(s)?;
        Ok(self.step_unchecked(s, u))
    }

    #[inline]
    pub(crate) fn step_unchecked(&self, s: LatticeState, u: f64) -> LatticeState {
        if s.x != 0 && s.y != 0 {
            // Interior: four equal quarters, no kernel evaluation needed.
            let dir = Direction::ORDER[((u * 4.0) as usize).min(3)];
            return s.moved(dir);
        }
        let probs = self.probabilities_unchecked(s);
        let mut acc = 0.0;
        let mut last = Direction::PlusX;
        for (dir, p) in Direction::ORDER.iter().zip(probs) {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = *dir;
            if u < acc {
                return s.moved(*dir);
            }
        }
        // Only reachable when rounding leaves acc a hair below u.
        s.moved(last)
    }

    pub fn step(&self, s: LatticeState, rng: &mut crate::rng::RngStream) -> Result<LatticeState> {
        self.step_with(s, rng.uniform())
    }
}
