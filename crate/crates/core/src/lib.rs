//! Simultaneous mobility of two nodes in adjacent zones.
//!
//! Two mobile nodes start in neighbouring zones on a line and move towards
//! each other by the same random step in every interval. A node hands over
//! when it touches or passes the brink plane separating the zones; when both
//! do so on the same move the handover is simultaneous.
//!
//! * [`model`]: layout, position update and crossing classifier
//! * [`sampling`]: seeded step and start-position draws
//! * [`scenarios`]: independent-trial and sequential experiments, presets
//! * [`stats`]: tallies, the average-step estimator, exact enumeration
//! * [`trace`], [`export`], [`datasets`]: trace lines, CSV/JSON, embedded tables

pub mod datasets;
pub mod export;
pub mod model;
pub mod sampling;
pub mod scenarios;
pub mod stats;
pub mod trace;

pub use model::{
    advance, classify, mn0_crossed, mn1_crossed, MoveRecord, NodeId, Outcome, Position, StepLength,
    ZoneLayout, ZoneRange,
};
pub use sampling::{MoveSource, Sampler, SamplerConfig, ScriptedSource};
pub use scenarios::{preset, ScenarioConfig};
pub use stats::Tally;
