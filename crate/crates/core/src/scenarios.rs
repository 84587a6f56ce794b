//! The two experiment shapes and the three preset parameterizations.
//!
//! * Independent trials: every trial draws fresh initial positions and a
//!   single step, moves both nodes once and classifies the result.
//! * Sequential runs: both nodes start from fixed positions and keep moving by
//!   a shared random step until the first crossing (or a step cap).
//!
//! Each sample (independent shape) or run (sequential shape) owns sampler
//! substream `k`, so the batch is computed in parallel and still matches a
//! serial execution exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    classify, LayoutError, MoveRecord, NodeId, Outcome, Position, ZoneLayout, ZoneRange,
};
use crate::sampling::{
    validate, MoveSource, Sampler, SamplerConfig, ScriptedSource, ValidationReport,
};
use crate::stats::Tally;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_MAX_STEPS_CAP: u32 = 10_000;
pub const DEFAULT_RUNS_PER_SAMPLE: u32 = 30;
pub const DEFAULT_SAMPLES: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("{0} must be at least 1")]
    MustBePositive(&'static str),
    #[error("MN_{node} start {start} lies outside its zone {zone}")]
    StartOutsideZone {
        node: NodeId,
        start: Position,
        zone: ZoneRange,
    },
    #[error("unknown preset {0} (expected 1, 2 or 3)")]
    UnknownPreset(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentTrialConfig {
    pub sampler: SamplerConfig,
    pub runs_per_sample: u32,
    pub samples: u32,
}

impl IndependentTrialConfig {
    pub fn validate(&self) -> Result<ValidationReport, ConfigError> {
        if self.runs_per_sample == 0 {
            return Err(ConfigError::MustBePositive("runs_per_sample"));
        }
        if self.samples == 0 {
            return Err(ConfigError::MustBePositive("samples"));
        }
        Ok(validate(&self.sampler))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentialConfig {
    pub sampler: SamplerConfig,
    pub mn0_start: Position,
    pub mn1_start: Position,
    pub runs: u32,
    #[serde(default = "default_cap")]
    pub max_steps_cap: u32,
}

fn default_cap() -> u32 {
    DEFAULT_MAX_STEPS_CAP
}

impl SequentialConfig {
    pub fn validate(&self) -> Result<ValidationReport, ConfigError> {
        if self.runs == 0 {
            return Err(ConfigError::MustBePositive("runs"));
        }
        if self.max_steps_cap == 0 {
            return Err(ConfigError::MustBePositive("max_steps_cap"));
        }
        let layout = &self.sampler.layout;
        for (node, start, zone) in [
            (NodeId::Mn0, self.mn0_start, layout.zone0()),
            (NodeId::Mn1, self.mn1_start, layout.zone1()),
        ] {
            if !zone.contains(start) {
                return Err(ConfigError::StartOutsideZone { node, start, zone });
            }
        }
        Ok(validate(&self.sampler))
    }
}

/// A scenario of either shape, as loaded from a preset or a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ScenarioConfig {
    Independent(IndependentTrialConfig),
    Sequential(SequentialConfig),
}

impl ScenarioConfig {
    pub fn sampler(&self) -> &SamplerConfig {
        match self {
            ScenarioConfig::Independent(c) => &c.sampler,
            ScenarioConfig::Sequential(c) => &c.sampler,
        }
    }

    pub fn sampler_mut(&mut self) -> &mut SamplerConfig {
        match self {
            ScenarioConfig::Independent(c) => &mut c.sampler,
            ScenarioConfig::Sequential(c) => &mut c.sampler,
        }
    }

    pub fn layout(&self) -> &ZoneLayout {
        &self.sampler().layout
    }

    pub fn validate(&self) -> Result<ValidationReport, ConfigError> {
        match self {
            ScenarioConfig::Independent(c) => c.validate(),
            ScenarioConfig::Sequential(c) => c.validate(),
        }
    }
}

fn preset_layout(z0: (i64, i64), brink: i64, z1: (i64, i64)) -> ZoneLayout {
    ZoneLayout::new(
        ZoneRange::new(z0.0, z0.1),
        ZoneRange::new(z1.0, z1.1),
        brink,
    )
    .expect("preset layouts are valid")
}

/// The three compiled-in experiments, seeded with [`DEFAULT_SEED`].
pub fn preset(id: u32) -> Result<ScenarioConfig, ConfigError> {
    let independent = |layout| {
        ScenarioConfig::Independent(IndependentTrialConfig {
            sampler: SamplerConfig::new(DEFAULT_SEED, 50, layout),
            runs_per_sample: DEFAULT_RUNS_PER_SAMPLE,
            samples: DEFAULT_SAMPLES,
        })
    };
    match id {
        1 => Ok(independent(preset_layout((0, 374), 375, (376, 750)))),
        2 => Ok(independent(preset_layout((50, 99), 100, (101, 150)))),
        3 => Ok(ScenarioConfig::Sequential(SequentialConfig {
            sampler: SamplerConfig::new(DEFAULT_SEED, 50, preset_layout((0, 249), 250, (251, 500))),
            mn0_start: Position(10),
            mn1_start: Position(500),
            runs: DEFAULT_RUNS_PER_SAMPLE,
            max_steps_cap: DEFAULT_MAX_STEPS_CAP,
        })),
        other => Err(ConfigError::UnknownPreset(other)),
    }
}

/// A move together with its classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedMove {
    #[serde(flatten)]
    pub record: MoveRecord,
    pub outcome: Outcome,
}

/// One trial: fresh initial positions, one shared step, one classification.
pub fn run_independent_trial<S: MoveSource>(source: &mut S, layout: &ZoneLayout) -> ClassifiedMove {
    let (mn0, mn1) = source.draw_init_positions();
    let step = source.draw_step();
    let record = MoveRecord::new(step, mn0, mn1);
    ClassifiedMove {
        record,
        outcome: classify(&record, layout),
    }
}

pub fn run_independent_batch<S: MoveSource>(
    source: &mut S,
    layout: &ZoneLayout,
    trials: u32,
) -> (Tally, Vec<ClassifiedMove>) {
    let mut tally = Tally::default();
    let moves: Vec<_> = (0..trials)
        .map(|_| {
            let m = run_independent_trial(source, layout);
            tally.record(m.outcome);
            m
        })
        .collect();
    (tally, moves)
}

/// Classifies previously recorded independent moves by feeding their draws
/// back through the trial runner.
pub fn replay_independent(
    records: &[MoveRecord],
    layout: &ZoneLayout,
) -> (Tally, Vec<ClassifiedMove>) {
    let mut source = ScriptedSource::from_records(records);
    run_independent_batch(&mut source, layout, records.len() as u32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub sample: u32,
    pub tally: Tally,
    pub moves: Vec<ClassifiedMove>,
}

pub fn run_independent_scenario(
    config: &IndependentTrialConfig,
) -> Result<Vec<SampleResult>, ConfigError> {
    config.validate()?;
    let layout = config.sampler.layout;
    Ok((0..config.samples)
        .into_par_iter()
        .map(|sample| {
            let mut sampler = Sampler::substream(&config.sampler, u64::from(sample));
            let (tally, moves) =
                run_independent_batch(&mut sampler, &layout, config.runs_per_sample);
            SampleResult {
                sample,
                tally,
                moves,
            }
        })
        .collect())
}

/// A chained walk from fixed starts up to the first crossing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialRun {
    pub records: Vec<MoveRecord>,
    pub terminal: Outcome,
    pub steps_taken: u32,
    pub timed_out: bool,
}

impl SequentialRun {
    pub fn final_positions(&self) -> Option<(Position, Position)> {
        self.records.last().map(|r| (r.mn0_new, r.mn1_new))
    }
}

pub fn run_sequential<S: MoveSource>(source: &mut S, config: &SequentialConfig) -> SequentialRun {
    let layout = &config.sampler.layout;
    let (mut mn0, mut mn1) = (config.mn0_start, config.mn1_start);
    let mut records = Vec::new();
    for _ in 0..config.max_steps_cap {
        let record = MoveRecord::new(source.draw_step(), mn0, mn1);
        let outcome = classify(&record, layout);
        records.push(record);
        if outcome != Outcome::NoOverlap {
            return SequentialRun {
                steps_taken: records.len() as u32,
                records,
                terminal: outcome,
                timed_out: false,
            };
        }
        mn0 = record.mn0_new;
        mn1 = record.mn1_new;
    }
    SequentialRun {
        steps_taken: records.len() as u32,
        records,
        terminal: Outcome::NoOverlap,
        timed_out: true,
    }
}

/// Replays a recorded chain of steps from its first row's positions. A chain
/// that never crosses comes back with `timed_out` set.
pub fn replay_sequential(records: &[MoveRecord], layout: &ZoneLayout) -> Option<SequentialRun> {
    let first = records.first()?;
    let config = SequentialConfig {
        sampler: SamplerConfig::new(0, 0, *layout),
        mn0_start: first.mn0_init,
        mn1_start: first.mn1_init,
        runs: 1,
        max_steps_cap: records.len() as u32,
    };
    let mut source = ScriptedSource::new().with_steps(records.iter().map(|r| r.step));
    Some(run_sequential(&mut source, &config))
}

/// Runs every sequential run on its own substream and tallies terminal
/// outcomes; timed-out runs count as `no_overlap`.
pub fn run_sequential_scenario(
    config: &SequentialConfig,
) -> Result<(Tally, Vec<SequentialRun>), ConfigError> {
    config.validate()?;
    let runs: Vec<SequentialRun> = (0..config.runs)
        .into_par_iter()
        .map(|k| {
            run_sequential(
                &mut Sampler::substream(&config.sampler, u64::from(k)),
                config,
            )
        })
        .collect();
    let tally = runs.iter().map(|r| r.terminal).collect();
    Ok((tally, runs))
}

pub fn mean_steps_taken(runs: &[SequentialRun]) -> Option<f64> {
    if runs.is_empty() {
        return None;
    }
    Some(runs.iter().map(|r| f64::from(r.steps_taken)).sum::<f64>() / runs.len() as f64)
}
