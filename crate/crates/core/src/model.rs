//! Geometry of the two-zone layout, the simultaneous position update, and the
//! brink-plane crossing classifier.
//!
//! Everything here is one-dimensional: both nodes travel along the x-axis,
//! MN_0 in the positive direction out of Zone_0 and MN_1 in the negative
//! direction out of Zone_1. A node hands over as soon as it touches or passes
//! the brink plane.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Duration of one move in seconds (Δt = 1 ms).
pub const MOVE_INTERVAL_S: f64 = 0.001;

/// Integer coordinate on the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub i64);

impl Position {
    pub const fn new(x: i64) -> Self {
        Self(x)
    }

    pub const fn x(self) -> i64 {
        self.0
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Position {
    fn from(x: i64) -> Self {
        Self(x)
    }
}

impl Add<StepLength> for Position {
    type Output = Position;

    fn add(self, step: StepLength) -> Position {
        Position(self.0 + i64::from(step.0))
    }
}

impl Sub<StepLength> for Position {
    type Output = Position;

    fn sub(self, step: StepLength) -> Position {
        Position(self.0 - i64::from(step.0))
    }
}

/// Distance both nodes travel during one interval.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct StepLength(pub u32);

impl StepLength {
    pub const ZERO: StepLength = StepLength(0);

    pub const fn new(value: u32) -> Self {
        Self(value)
    }

    pub const fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for StepLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<StepLength> for f64 {
    fn from(step: StepLength) -> f64 {
        f64::from(step.0)
    }
}

/// Inclusive integer range `lo..=hi` occupied by one zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZoneRange {
    pub lo: i64,
    pub hi: i64,
}

impl ZoneRange {
    pub const fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    /// Number of integer positions in the zone (`hi - lo + 1`).
    pub fn width(&self) -> i64 {
        self.hi - self.lo + 1
    }

    /// Distance from one edge to the other (`hi - lo`). This is the "unit
    /// distance" the crossing estimator divides by, e.g. 374 for `0..=374`.
    pub fn span(&self) -> i64 {
        self.hi - self.lo
    }

    pub fn contains(&self, p: Position) -> bool {
        (self.lo..=self.hi).contains(&p.0)
    }
}

impl fmt::Display for ZoneRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl std::str::FromStr for ZoneRange {
    type Err = String;

    /// Parses `LO:HI`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let lo = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad zone bound {lo:?}: {e}"))?;
        let hi = hi
            .trim()
            .parse()
            .map_err(|e| format!("bad zone bound {hi:?}: {e}"))?;
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("zone {zone} is empty ({range})")]
    EmptyZone { zone: u8, range: ZoneRange },
    #[error("zone 0 ({zone0}) must end strictly below the brink plane at {brink}")]
    Zone0ReachesBrink { zone0: ZoneRange, brink: i64 },
    #[error("zone 1 ({zone1}) must start strictly above the brink plane at {brink}")]
    Zone1ReachesBrink { zone1: ZoneRange, brink: i64 },
}

/// Two adjacent zones separated by the brink plane:
/// `zone0.lo <= zone0.hi < brink < zone1.lo <= zone1.hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLayout", into = "RawLayout")]
pub struct ZoneLayout {
    zone0: ZoneRange,
    zone1: ZoneRange,
    brink: Position,
}

#[derive(Serialize, Deserialize)]
struct RawLayout {
    zone0: ZoneRange,
    zone1: ZoneRange,
    brink: i64,
}

impl TryFrom<RawLayout> for ZoneLayout {
    type Error = LayoutError;

    fn try_from(raw: RawLayout) -> Result<Self, Self::Error> {
        ZoneLayout::new(raw.zone0, raw.zone1, raw.brink)
    }
}

impl From<ZoneLayout> for RawLayout {
    fn from(layout: ZoneLayout) -> Self {
        RawLayout {
            zone0: layout.zone0,
            zone1: layout.zone1,
            brink: layout.brink.0,
        }
    }
}

impl ZoneLayout {
    pub fn new(zone0: ZoneRange, zone1: ZoneRange, brink: i64) -> Result<Self, LayoutError> {
        if zone0.lo > zone0.hi {
            return Err(LayoutError::EmptyZone {
                zone: 0,
                range: zone0,
            });
        }
        if zone1.lo > zone1.hi {
            return Err(LayoutError::EmptyZone {
                zone: 1,
                range: zone1,
            });
        }
        if zone0.hi >= brink {
            return Err(LayoutError::Zone0ReachesBrink { zone0, brink });
        }
        if zone1.lo <= brink {
            return Err(LayoutError::Zone1ReachesBrink { zone1, brink });
        }
        Ok(Self {
            zone0,
            zone1,
            brink: Position(brink),
        })
    }

    pub fn zone0(&self) -> ZoneRange {
        self.zone0
    }

    pub fn zone1(&self) -> ZoneRange {
        self.zone1
    }

    pub fn brink(&self) -> Position {
        self.brink
    }

    /// Reflects the layout about its own brink plane. The reflected zone 0 is
    /// the mirror image of zone 1 and vice versa, so MN_0 and MN_1 trade roles.
    pub fn mirrored(&self) -> Self {
        let b = self.brink.0;
        Self {
            zone0: ZoneRange::new(2 * b - self.zone1.hi, 2 * b - self.zone1.lo),
            zone1: ZoneRange::new(2 * b - self.zone0.hi, 2 * b - self.zone0.lo),
            brink: self.brink,
        }
    }

    /// Mirror image of a single coordinate about the brink plane.
    pub fn reflect(&self, p: Position) -> Position {
        Position(2 * self.brink.0 - p.0)
    }
}

impl fmt::Display for ZoneLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "zone0 {} | brink {} | zone1 {}",
            self.zone0, self.brink, self.zone1
        )
    }
}

/// One of the two mobile nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeId {
    #[serde(rename = "0")]
    Mn0,
    #[serde(rename = "1")]
    Mn1,
}

impl NodeId {
    pub fn index(self) -> u8 {
        match self {
            NodeId::Mn0 => 0,
            NodeId::Mn1 => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            0 => Some(NodeId::Mn0),
            1 => Some(NodeId::Mn1),
            _ => None,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("record violates the position update: step {step}, MN_0 {mn0_init}->{mn0_new}, MN_1 {mn1_init}->{mn1_new}")]
pub struct InconsistentRecord {
    pub step: StepLength,
    pub mn0_init: Position,
    pub mn0_new: Position,
    pub mn1_init: Position,
    pub mn1_new: Position,
}

/// One simultaneous move of both nodes by the same step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub time_s: f64,
    pub step: StepLength,
    pub mn0_init: Position,
    pub mn0_new: Position,
    pub mn1_init: Position,
    pub mn1_new: Position,
}

impl MoveRecord {
    /// Applies `step` to both initial positions.
    pub fn new(step: StepLength, mn0_init: Position, mn1_init: Position) -> Self {
        let (mn0_new, mn1_new) = advance(mn0_init, mn1_init, step);
        Self {
            time_s: MOVE_INTERVAL_S,
            step,
            mn0_init,
            mn0_new,
            mn1_init,
            mn1_new,
        }
    }

    /// Builds a record from all five columns, rejecting rows whose new
    /// positions do not follow from the step.
    pub fn from_columns(
        step: StepLength,
        mn0_init: Position,
        mn0_new: Position,
        mn1_init: Position,
        mn1_new: Position,
    ) -> Result<Self, InconsistentRecord> {
        let rec = Self::new(step, mn0_init, mn1_init);
        if rec.mn0_new != mn0_new || rec.mn1_new != mn1_new {
            return Err(InconsistentRecord {
                step,
                mn0_init,
                mn0_new,
                mn1_init,
                mn1_new,
            });
        }
        Ok(rec)
    }

    pub fn is_consistent(&self) -> bool {
        self.mn0_new == self.mn0_init + self.step && self.mn1_new == self.mn1_init - self.step
    }

    pub fn init(&self, node: NodeId) -> Position {
        match node {
            NodeId::Mn0 => self.mn0_init,
            NodeId::Mn1 => self.mn1_init,
        }
    }

    pub fn new_position(&self, node: NodeId) -> Position {
        match node {
            NodeId::Mn0 => self.mn0_new,
            NodeId::Mn1 => self.mn1_new,
        }
    }

    /// The same move seen in the layout reflected about its brink plane.
    pub fn mirrored(&self, layout: &ZoneLayout) -> Self {
        Self {
            time_s: self.time_s,
            step: self.step,
            mn0_init: layout.reflect(self.mn1_init),
            mn0_new: layout.reflect(self.mn1_new),
            mn1_init: layout.reflect(self.mn0_init),
            mn1_new: layout.reflect(self.mn0_new),
        }
    }
}

/// Classification of a single move against the brink plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    NoOverlap,
    Mn0Overlap,
    Mn1Overlap,
    SimultaneousOverlap,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::NoOverlap,
        Outcome::Mn0Overlap,
        Outcome::Mn1Overlap,
        Outcome::SimultaneousOverlap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::NoOverlap => "no_overlap",
            Outcome::Mn0Overlap => "mn0_overlap",
            Outcome::Mn1Overlap => "mn1_overlap",
            Outcome::SimultaneousOverlap => "simultaneous_overlap",
        }
    }

    /// Outcome with the roles of MN_0 and MN_1 exchanged.
    pub fn swapped(self) -> Self {
        match self {
            Outcome::Mn0Overlap => Outcome::Mn1Overlap,
            Outcome::Mn1Overlap => Outcome::Mn0Overlap,
            other => other,
        }
    }

    pub fn mn0_crossed(self) -> bool {
        matches!(self, Outcome::Mn0Overlap | Outcome::SimultaneousOverlap)
    }

    pub fn mn1_crossed(self) -> bool {
        matches!(self, Outcome::Mn1Overlap | Outcome::SimultaneousOverlap)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| format!("unknown outcome {s:?}"))
    }
}

/// Moves MN_0 forward and MN_1 backward by the same step.
pub fn advance(mn0: Position, mn1: Position, step: StepLength) -> (Position, Position) {
    (mn0 + step, mn1 - step)
}

/// MN_0 hands over once it touches or passes the brink.
pub fn mn0_crossed(p: Position, layout: &ZoneLayout) -> bool {
    p >= layout.brink
}

/// MN_1 travels in the negative direction, so the test is mirrored.
pub fn mn1_crossed(p: Position, layout: &ZoneLayout) -> bool {
    p <= layout.brink
}

pub fn classify(rec: &MoveRecord, layout: &ZoneLayout) -> Outcome {
    match (
        mn0_crossed(rec.mn0_new, layout),
        mn1_crossed(rec.mn1_new, layout),
    ) {
        (true, true) => Outcome::SimultaneousOverlap,
        (true, false) => Outcome::Mn0Overlap,
        (false, true) => Outcome::Mn1Overlap,
        (false, false) => Outcome::NoOverlap,
    }
}
