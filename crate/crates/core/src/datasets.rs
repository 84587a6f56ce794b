//! Published movement tables, embedded as replay fixtures.
//!
//! Rows are stored as `[step, mn0_init, mn0_new, mn1_init, mn1_new]`, verbatim
//! except for one row of the Scenario 3 chain (see [`TABLE_6_NOTE`]).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{MoveRecord, Position, StepLength, ZoneLayout, ZoneRange};

type Row = [i64; 5];

/// Sample moves illustrating the position update. Not tied to any zone layout.
const TABLE_1: [Row; 3] = [
    [5, 14, 19, 55, 50],
    [7, 20, 27, 48, 41],
    [9, 28, 37, 41, 32],
];

/// Scenario 1 moves. Printed with 31 rows for a batch of 30 runs.
const TABLE_3: [Row; 31] = [
    [6, 84, 90, 534, 528],
    [16, 276, 292, 396, 380],
    [14, 308, 322, 508, 494],
    [14, 352, 366, 504, 490],
    [45, 308, 353, 501, 456],
    [9, 310, 319, 402, 393],
    [18, 352, 370, 381, 363],
    [37, 161, 198, 381, 344],
    [31, 311, 342, 470, 439],
    [34, 331, 365, 438, 404],
    [35, 300, 335, 446, 411],
    [5, 330, 335, 387, 382],
    [12, 284, 296, 449, 437],
    [30, 58, 88, 494, 464],
    [3, 150, 153, 476, 473],
    [31, 220, 251, 498, 467],
    [44, 84, 128, 513, 469],
    [20, 308, 328, 423, 403],
    [10, 150, 160, 473, 463],
    [3, 102, 105, 432, 429],
    [14, 316, 330, 411, 397],
    [4, 149, 153, 454, 450],
    [43, 56, 99, 422, 379],
    [45, 54, 99, 440, 395],
    [8, 108, 116, 513, 505],
    [2, 262, 264, 379, 377],
    [28, 356, 384, 407, 379],
    [6, 255, 261, 388, 382],
    [33, 315, 348, 524, 491],
    [35, 158, 193, 515, 480],
    [32, 332, 364, 548, 516],
];

/// Scenario 2 moves.
const TABLE_5: [Row; 30] = [
    [36, 99, 135, 142, 106],
    [0, 96, 96, 146, 146],
    [20, 74, 94, 148, 128],
    [9, 55, 64, 101, 92],
    [10, 90, 100, 137, 127],
    [4, 60, 64, 110, 106],
    [17, 68, 85, 150, 133],
    [29, 59, 88, 135, 106],
    [5, 78, 83, 127, 122],
    [8, 75, 83, 142, 134],
    [46, 96, 142, 147, 101],
    [6, 71, 77, 132, 126],
    [8, 76, 84, 109, 101],
    [33, 75, 108, 102, 69],
    [49, 92, 141, 134, 85],
    [33, 90, 123, 142, 109],
    [31, 73, 104, 125, 94],
    [14, 53, 67, 107, 93],
    [20, 81, 101, 147, 127],
    [28, 98, 126, 148, 120],
    [38, 72, 110, 148, 110],
    [19, 62, 81, 127, 108],
    [15, 68, 83, 133, 118],
    [7, 85, 92, 124, 117],
    [14, 82, 96, 126, 112],
    [45, 86, 131, 145, 100],
    [31, 71, 102, 150, 119],
    [43, 95, 138, 137, 94],
    [24, 51, 75, 130, 106],
    [3, 52, 55, 121, 118],
];

/// One Scenario 3 run, chained from (10, 500) to the simultaneous handover.
const TABLE_6: [Row; 11] = [
    [28, 10, 38, 500, 472],
    [43, 38, 81, 472, 429],
    [37, 81, 118, 429, 392],
    [9, 118, 127, 392, 383],
    [20, 127, 147, 383, 363],
    [2, 147, 149, 363, 361],
    [28, 149, 177, 361, 333],
    [0, 177, 177, 333, 333],
    [48, 177, 225, 333, 285],
    [22, 225, 247, 285, 263],
    [42, 247, 289, 263, 221],
];

pub const TABLE_6_NOTE: &str = "row 9 (step 48) is printed with MN_1 new = 282; stored as 285, \
     which is 333 - 48 and the MN_1 initial position of row 10";

pub const TABLE_3_NOTE: &str = "31 rows printed for a stated batch of 30 runs; all rows kept";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DatasetId {
    #[serde(rename = "table-1")]
    Table1,
    #[serde(rename = "table-3")]
    Table3,
    #[serde(rename = "table-5")]
    Table5,
    #[serde(rename = "table-6")]
    Table6,
}

impl DatasetId {
    pub const ALL: [DatasetId; 4] = [
        DatasetId::Table1,
        DatasetId::Table3,
        DatasetId::Table5,
        DatasetId::Table6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetId::Table1 => "table-1",
            DatasetId::Table3 => "table-3",
            DatasetId::Table5 => "table-5",
            DatasetId::Table6 => "table-6",
        }
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown dataset {0:?} (expected table-1, table-3, table-5 or table-6)")]
pub struct UnknownDataset(pub String);

impl FromStr for DatasetId {
    type Err = UnknownDataset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DatasetId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| UnknownDataset(s.to_string()))
    }
}

/// Whether rows are unrelated single moves or one chained walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetShape {
    Independent,
    Sequential,
}

/// Counts printed alongside a dataset, in the column order of the summary
/// tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PublishedCounts {
    pub mn0_overlaps: u64,
    pub mn0_handover: u64,
    pub mn1_overlaps: u64,
    pub mn1_handover: u64,
    pub simultaneous_overlap: u64,
    pub no_overlap: u64,
    pub simultaneous_handover: u64,
}

/// A published count the replay is known not to reproduce, with the reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KnownDiscrepancy {
    pub column: &'static str,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayDataset {
    pub id: DatasetId,
    pub shape: DatasetShape,
    pub layout: ZoneLayout,
    pub rows: Vec<MoveRecord>,
    pub notes: Vec<&'static str>,
    /// Counts printed for the batch this dataset came from. `None` when the
    /// dataset is not a whole batch.
    pub published: Option<PublishedCounts>,
    pub known_discrepancies: Vec<KnownDiscrepancy>,
    /// Step-length sum and run count printed for the batch, when given.
    pub published_step_sum: Option<(f64, u32)>,
}

fn layout(z0: (i64, i64), brink: i64, z1: (i64, i64)) -> ZoneLayout {
    ZoneLayout::new(
        ZoneRange::new(z0.0, z0.1),
        ZoneRange::new(z1.0, z1.1),
        brink,
    )
    .expect("embedded layouts are valid")
}

fn records(rows: &[Row]) -> Vec<MoveRecord> {
    rows.iter()
        .map(|r| {
            let step = StepLength(u32::try_from(r[0]).expect("embedded steps are non-negative"));
            MoveRecord::from_columns(
                step,
                Position(r[1]),
                Position(r[2]),
                Position(r[3]),
                Position(r[4]),
            )
            .expect("embedded rows satisfy the position update")
        })
        .collect()
}

pub fn load_dataset(id: DatasetId) -> ReplayDataset {
    match id {
        DatasetId::Table1 => ReplayDataset {
            id,
            shape: DatasetShape::Independent,
            // no layout is published for these rows; the brink sits between
            // the largest MN_0 and smallest MN_1 initial positions
            layout: layout((0, 34), 35, (36, 70)),
            rows: records(&TABLE_1),
            notes: vec!["illustrative rows; the layout is a stand-in, not a published one"],
            published: None,
            known_discrepancies: vec![],
            published_step_sum: None,
        },
        DatasetId::Table3 => ReplayDataset {
            id,
            shape: DatasetShape::Independent,
            layout: layout((0, 374), 375, (376, 750)),
            rows: records(&TABLE_3),
            notes: vec![TABLE_3_NOTE],
            published: Some(PublishedCounts {
                mn0_overlaps: 1,
                mn0_handover: 1,
                mn1_overlaps: 1,
                mn1_handover: 1,
                simultaneous_overlap: 0,
                no_overlap: 28,
                simultaneous_handover: 0,
            }),
            known_discrepancies: vec![
                KnownDiscrepancy {
                    column: "MN_1 overlaps",
                    note: "rows (18: 381->363) and (37: 381->344) both reach the brink; \
                           the printed count is 1",
                },
                KnownDiscrepancy {
                    column: "MN_1 handover",
                    note: "follows from the MN_1 overlaps difference",
                },
            ],
            // the 31 printed steps sum to 667, not 638.1
            published_step_sum: Some((638.1, 30)),
        },
        DatasetId::Table5 => ReplayDataset {
            id,
            shape: DatasetShape::Independent,
            layout: layout((50, 99), 100, (101, 150)),
            rows: records(&TABLE_5),
            notes: vec![],
            published: Some(PublishedCounts {
                mn0_overlaps: 8,
                mn0_handover: 13,
                mn1_overlaps: 2,
                mn1_handover: 7,
                simultaneous_overlap: 5,
                no_overlap: 5,
                simultaneous_handover: 5,
            }),
            known_discrepancies: vec![KnownDiscrepancy {
                column: "No overlap",
                note: "30 rows minus 15 overlapping rows leaves 15; the printed 5 \
                       cannot satisfy the partition",
            }],
            published_step_sum: None,
        },
        DatasetId::Table6 => ReplayDataset {
            id,
            shape: DatasetShape::Sequential,
            layout: layout((0, 249), 250, (251, 500)),
            rows: records(&TABLE_6),
            notes: vec![TABLE_6_NOTE],
            published: None,
            known_discrepancies: vec![],
            published_step_sum: None,
        },
    }
}

impl ReplayDataset {
    pub fn steps(&self) -> Vec<StepLength> {
        self.rows.iter().map(|r| r.step).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, Outcome};

    #[test]
    fn ids_parse() {
        for id in DatasetId::ALL {
            assert_eq!(id.as_str().parse::<DatasetId>().unwrap(), id);
        }
        assert!("table-2".parse::<DatasetId>().is_err());
    }

    #[test]
    fn row_counts_and_anchors() {
        let t5 = load_dataset(DatasetId::Table5);
        assert_eq!(t5.rows.len(), 30);
        let r = t5.rows[0];
        assert_eq!(
            (r.step, r.mn0_init, r.mn0_new, r.mn1_init, r.mn1_new),
            (
                StepLength(36),
                Position(99),
                Position(135),
                Position(142),
                Position(106)
            )
        );
        assert_eq!(load_dataset(DatasetId::Table3).rows.len(), 31);
        let t6 = load_dataset(DatasetId::Table6);
        assert_eq!(t6.rows.len(), 11);
        let r = t6.rows[10];
        assert_eq!(
            (r.step, r.mn0_init, r.mn0_new, r.mn1_init, r.mn1_new),
            (
                StepLength(42),
                Position(247),
                Position(289),
                Position(263),
                Position(221)
            )
        );
        assert_eq!(load_dataset(DatasetId::Table1).rows.len(), 3);
    }

    #[test]
    fn every_row_obeys_the_update() {
        for id in DatasetId::ALL {
            assert!(
                load_dataset(id).rows.iter().all(MoveRecord::is_consistent),
                "{id}"
            );
        }
    }

    #[test]
    fn table_6_chains() {
        let t6 = load_dataset(DatasetId::Table6);
        for w in t6.rows.windows(2) {
            assert_eq!(w[1].mn0_init, w[0].mn0_new);
            assert_eq!(w[1].mn1_init, w[0].mn1_new);
        }
    }

    #[test]
    fn table_1_under_stand_in_layout() {
        let t1 = load_dataset(DatasetId::Table1);
        let outcomes: Vec<_> = t1.rows.iter().map(|r| classify(r, &t1.layout)).collect();
        assert_eq!(
            outcomes,
            vec![
                Outcome::NoOverlap,
                Outcome::NoOverlap,
                Outcome::SimultaneousOverlap
            ]
        );
    }
}
