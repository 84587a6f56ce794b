//! Outcome tallies, the average-step crossing estimator, and an exact
//! enumeration of crossing probabilities used to check the estimator.

use std::ops::AddAssign;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{NodeId, Outcome, ZoneLayout};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StatsError {
    #[error("average of an empty list of step lengths")]
    EmptySteps,
    #[error("average step length must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("zone width must be positive, got {0}")]
    NonPositiveWidth(f64),
}

/// Outcome counts for one batch. The handover totals are derived:
/// a node hands over on its own overlap and on every simultaneous overlap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub mn0_only: u64,
    pub mn1_only: u64,
    pub simultaneous: u64,
    pub no_overlap: u64,
    pub mn0_handover: u64,
    pub mn1_handover: u64,
    pub trials: u64,
}

impl Tally {
    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::NoOverlap => self.no_overlap += 1,
            Outcome::Mn0Overlap => self.mn0_only += 1,
            Outcome::Mn1Overlap => self.mn1_only += 1,
            Outcome::SimultaneousOverlap => self.simultaneous += 1,
        }
        self.trials += 1;
        self.mn0_handover = self.mn0_only + self.simultaneous;
        self.mn1_handover = self.mn1_only + self.simultaneous;
    }

    /// Moves where at least one node crossed.
    pub fn any_overlap(&self) -> u64 {
        self.mn0_only + self.mn1_only + self.simultaneous
    }

    pub fn crossings(&self, node: NodeId) -> u64 {
        match node {
            NodeId::Mn0 => self.mn0_handover,
            NodeId::Mn1 => self.mn1_handover,
        }
    }

    pub fn identities_hold(&self) -> bool {
        self.mn0_handover == self.mn0_only + self.simultaneous
            && self.mn1_handover == self.mn1_only + self.simultaneous
            && self.any_overlap() + self.no_overlap == self.trials
    }
}

impl AddAssign for Tally {
    fn add_assign(&mut self, rhs: Tally) {
        self.mn0_only += rhs.mn0_only;
        self.mn1_only += rhs.mn1_only;
        self.simultaneous += rhs.simultaneous;
        self.no_overlap += rhs.no_overlap;
        self.mn0_handover += rhs.mn0_handover;
        self.mn1_handover += rhs.mn1_handover;
        self.trials += rhs.trials;
    }
}

impl FromIterator<Outcome> for Tally {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Self {
        let mut t = Tally::default();
        for o in iter {
            t.record(o);
        }
        t
    }
}

pub fn tally(outcomes: &[Outcome]) -> Tally {
    outcomes.iter().copied().collect()
}

/// Arithmetic mean of several tallies, field by field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanTally {
    pub mn0_only: f64,
    pub mn1_only: f64,
    pub simultaneous: f64,
    pub no_overlap: f64,
    pub mn0_handover: f64,
    pub mn1_handover: f64,
    pub trials: f64,
    pub samples: u64,
}

impl MeanTally {
    pub fn of(tallies: &[Tally]) -> Self {
        let mut total = Tally::default();
        for t in tallies {
            total += *t;
        }
        let n = tallies.len().max(1) as f64;
        Self {
            mn0_only: total.mn0_only as f64 / n,
            mn1_only: total.mn1_only as f64 / n,
            simultaneous: total.simultaneous as f64 / n,
            no_overlap: total.no_overlap as f64 / n,
            mn0_handover: total.mn0_handover as f64 / n,
            mn1_handover: total.mn1_handover as f64 / n,
            trials: total.trials as f64 / n,
            samples: tallies.len() as u64,
        }
    }
}

/// Sum of step lengths over the number of runs.
pub fn average_step_length<T>(steps: &[T]) -> Result<f64, StatsError>
where
    T: Copy + Into<f64>,
{
    if steps.is_empty() {
        return Err(StatsError::EmptySteps);
    }
    let sum: f64 = steps.iter().map(|&s| s.into()).sum();
    Ok(sum / steps.len() as f64)
}

/// How many average-sized steps it takes to cover a zone.
pub fn expected_steps_to_cross(zone_width: f64, avg_step: f64) -> Result<f64, StatsError> {
    if avg_step.is_nan() || avg_step <= 0.0 {
        return Err(StatsError::NonPositiveStep(avg_step));
    }
    Ok(zone_width / avg_step)
}

/// Expected number of crossings over `trials` moves: `trials * avg_step / zone_width`.
pub fn expected_crossings(trials: u64, zone_width: f64, avg_step: f64) -> Result<f64, StatsError> {
    if zone_width.is_nan() || zone_width <= 0.0 {
        return Err(StatsError::NonPositiveWidth(zone_width));
    }
    if trials == 0 {
        return Ok(0.0);
    }
    let steps = expected_steps_to_cross(zone_width, avg_step)?;
    Ok(trials as f64 / steps)
}

/// Exact probability kept as an unreduced `favorable / total` pair so the
/// enumeration counts stay visible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactProbability {
    pub favorable: u64,
    pub total: u64,
}

impl ExactProbability {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.favorable, self.total)
    }

    pub fn as_f64(&self) -> f64 {
        self.favorable as f64 / self.total as f64
    }
}

impl std::fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.favorable, self.total)
    }
}

/// Probability that one independent move carries `node` across the brink,
/// counted over every (initial position, step) pair on the integer grid.
/// Rows of the grid are split across threads; counts are summed exactly.
pub fn exact_crossing_probability(
    layout: &ZoneLayout,
    max_step: u32,
    node: NodeId,
) -> ExactProbability {
    let zone = match node {
        NodeId::Mn0 => layout.zone0(),
        NodeId::Mn1 => layout.zone1(),
    };
    let brink = layout.brink().x();
    let favorable: u64 = (zone.lo..=zone.hi)
        .into_par_iter()
        .map(|init| {
            (0..=i64::from(max_step))
                .filter(|&step| match node {
                    NodeId::Mn0 => init + step >= brink,
                    NodeId::Mn1 => init - step <= brink,
                })
                .count() as u64
        })
        .sum();
    ExactProbability {
        favorable,
        total: zone.width() as u64 * (u64::from(max_step) + 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub avg_step: f64,
    pub expected_steps_to_cross: f64,
    pub expected_crossings: f64,
    pub observed_crossings: u64,
    pub exact_probability: Option<ExactProbability>,
}

impl EstimateReport {
    /// Average-step estimator for `trials` moves across a zone of the given span.
    pub fn from_average(
        avg_step: f64,
        zone_span: f64,
        trials: u64,
        observed_crossings: u64,
    ) -> Result<Self, StatsError> {
        Ok(Self {
            avg_step,
            expected_steps_to_cross: expected_steps_to_cross(zone_span, avg_step)?,
            expected_crossings: expected_crossings(trials, zone_span, avg_step)?,
            observed_crossings,
            exact_probability: None,
        })
    }

    pub fn with_exact(mut self, p: ExactProbability) -> Self {
        self.exact_probability = Some(p);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub expected: f64,
    pub observed: u64,
    pub abs_diff: f64,
    /// `|observed - expected| / expected`; `None` when only the expectation is zero.
    pub rel_diff: Option<f64>,
}

impl ComparisonRow {
    pub fn new(metric: impl Into<String>, expected: f64, observed: u64) -> Self {
        let abs_diff = (observed as f64 - expected).abs();
        let rel_diff = if expected != 0.0 {
            Some(abs_diff / expected.abs())
        } else if abs_diff == 0.0 {
            Some(0.0)
        } else {
            None
        };
        Self {
            metric: metric.into(),
            expected,
            observed,
            abs_diff,
            rel_diff,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

/// Estimated vs. observed crossings, per node and for any overlap at all.
/// Reporting only, no verdict.
pub fn compare(estimate: &EstimateReport, tally: &Tally) -> ComparisonReport {
    let e = estimate.expected_crossings;
    ComparisonReport {
        rows: vec![
            ComparisonRow::new("MN_0 handover", e, tally.mn0_handover),
            ComparisonRow::new("MN_1 handover", e, tally.mn1_handover),
            ComparisonRow::new("Any overlap", e, tally.any_overlap()),
        ],
    }
}

/// Rounds to two decimals for display.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}
