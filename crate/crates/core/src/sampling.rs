//! Seeded generation of step lengths and initial positions.
//!
//! The generator is ChaCha8 (`rand_chacha`), seeded from the configured
//! 64-bit seed with `seed_from_u64`. Substream `k` is the same key with the
//! ChaCha stream id set to `k`, so the state for sample `k` depends only on
//! `(seed, k)` and samples can run in any order or in parallel.
//!
//! Draw order inside one independent trial is fixed: MN_0's initial position,
//! MN_1's initial position, then the step.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{LayoutError, Position, StepLength, ZoneLayout, ZoneRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub max_step: u32,
    pub layout: ZoneLayout,
}

impl SamplerConfig {
    pub fn new(seed: u64, max_step: u32, layout: ZoneLayout) -> Self {
        Self {
            seed,
            max_step,
            layout,
        }
    }

    /// Builds a config from raw layout parts and checks it. Broken layouts
    /// are errors; an oversized step range only produces a warning.
    pub fn from_parts(
        seed: u64,
        max_step: u32,
        zone0: ZoneRange,
        zone1: ZoneRange,
        brink: i64,
    ) -> Result<(Self, ValidationReport), LayoutError> {
        let layout = ZoneLayout::new(zone0, zone1, brink)?;
        let config = Self::new(seed, max_step, layout);
        let report = validate(&config);
        Ok((config, report))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationWarning {
    /// A single step can carry a node across its whole zone.
    StepRangeExceedsZoneWidth { max_step: u32, zone_width: i64 },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::StepRangeExceedsZoneWidth {
                max_step,
                zone_width,
            } => write!(
                f,
                "step range >= zone width (max step {max_step}, narrowest zone {zone_width}); \
                 a single step may carry a node past the far edge of its own zone"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub warnings: Vec<ValidationWarning>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub fn validate(config: &SamplerConfig) -> ValidationReport {
    let narrowest = config
        .layout
        .zone0()
        .width()
        .min(config.layout.zone1().width());
    let mut report = ValidationReport::default();
    if i64::from(config.max_step) >= narrowest {
        report
            .warnings
            .push(ValidationWarning::StepRangeExceedsZoneWidth {
                max_step: config.max_step,
                zone_width: narrowest,
            });
    }
    report
}

/// Anything that can feed the scenario runners with initial positions and
/// step lengths: the seeded [`Sampler`] or a scripted replay.
pub trait MoveSource {
    fn draw_init_positions(&mut self) -> (Position, Position);
    fn draw_step(&mut self) -> StepLength;
}

/// Single-owner sampler state.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    max_step: u32,
    layout: ZoneLayout,
}

impl Sampler {
    /// Sampler on substream 0.
    pub fn new(config: &SamplerConfig) -> Self {
        Self::substream(config, 0)
    }

    pub fn substream(config: &SamplerConfig, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index);
        Self {
            rng,
            max_step: config.max_step,
            layout: config.layout,
        }
    }

    pub fn max_step(&self) -> u32 {
        self.max_step
    }

    pub fn layout(&self) -> &ZoneLayout {
        &self.layout
    }

    fn draw_in(&mut self, zone: ZoneRange) -> Position {
        Position(self.rng.gen_range(zone.lo..=zone.hi))
    }
}

impl MoveSource for Sampler {
    fn draw_init_positions(&mut self) -> (Position, Position) {
        let p0 = self.draw_in(self.layout.zone0());
        let p1 = self.draw_in(self.layout.zone1());
        (p0, p1)
    }

    fn draw_step(&mut self) -> StepLength {
        StepLength(self.rng.gen_range(0..=self.max_step))
    }
}

/// Replays fixed draws in order. Panics when a script runs dry, since a
/// scripted run that asks for more draws than were provided is a test bug.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    inits: std::collections::VecDeque<(Position, Position)>,
    steps: std::collections::VecDeque<StepLength>,
    fallback_step: Option<StepLength>,
}

impl ScriptedSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_inits(mut self, inits: impl IntoIterator<Item = (Position, Position)>) -> Self {
        self.inits.extend(inits);
        self
    }

    pub fn with_steps(mut self, steps: impl IntoIterator<Item = StepLength>) -> Self {
        self.steps.extend(steps);
        self
    }

    /// Step returned once the scripted steps are used up.
    pub fn then_repeat(mut self, step: StepLength) -> Self {
        self.fallback_step = Some(step);
        self
    }

    /// Script reproducing a list of independent moves exactly.
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a crate::model::MoveRecord>,
    ) -> Self {
        let mut source = Self::new();
        for rec in records {
            source.inits.push_back((rec.mn0_init, rec.mn1_init));
            source.steps.push_back(rec.step);
        }
        source
    }

    pub fn remaining_steps(&self) -> usize {
        self.steps.len()
    }
}

impl MoveSource for ScriptedSource {
    fn draw_init_positions(&mut self) -> (Position, Position) {
        self.inits
            .pop_front()
            .expect("scripted source ran out of initial positions")
    }

    fn draw_step(&mut self) -> StepLength {
        self.steps
            .pop_front()
            .or(self.fallback_step)
            .expect("scripted source ran out of steps")
    }
}
