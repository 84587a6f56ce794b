//! CSV and JSON serialization of moves and run results.

use std::io::{Read, Write};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::model::{InconsistentRecord, MoveRecord, Outcome, Position, StepLength};
use crate::sampling::ValidationWarning;
use crate::scenarios::{SampleResult, ScenarioConfig, SequentialRun};
use crate::stats::{EstimateReport, MeanTally, Tally};

pub const CSV_HEADER: [&str; 6] = [
    "step", "mn0_init", "mn0_new", "mn1_init", "mn1_new", "outcome",
];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv row {row}: {source}")]
    Inconsistent {
        row: usize,
        #[source]
        source: InconsistentRecord,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    step: u32,
    mn0_init: i64,
    mn0_new: i64,
    mn1_init: i64,
    mn1_new: i64,
    #[serde(default, deserialize_with = "csv::invalid_option")]
    outcome: Option<Outcome>,
}

/// Writes `step,mn0_init,mn0_new,mn1_init,mn1_new,outcome`. The header is
/// always written, even for an empty list.
pub fn write_csv<W: Write>(out: W, moves: &[(MoveRecord, Outcome)]) -> Result<(), ExportError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for (r, outcome) in moves {
        w.serialize(CsvRow {
            step: r.step.get(),
            mn0_init: r.mn0_init.x(),
            mn0_new: r.mn0_new.x(),
            mn1_init: r.mn1_init.x(),
            mn1_new: r.mn1_new.x(),
            outcome: Some(*outcome),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads moves back from CSV. The `outcome` column is optional and ignored;
/// rows are re-checked against the position update.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<MoveRecord>, ExportError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    rdr.deserialize::<CsvRow>()
        .enumerate()
        .map(|(i, row)| {
            let row = row?;
            MoveRecord::from_columns(
                StepLength(row.step),
                Position(row.mn0_init),
                Position(row.mn0_new),
                Position(row.mn1_init),
                Position(row.mn1_new),
            )
            .map_err(|source| ExportError::Inconsistent { row: i + 1, source })
        })
        .collect()
}

/// Everything a simulate run produces, in a stable key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RunResults {
    Independent {
        config: ScenarioConfig,
        warnings: Vec<String>,
        samples: Vec<SampleResult>,
        mean: MeanTally,
        estimate: Option<EstimateReport>,
    },
    Sequential {
        config: ScenarioConfig,
        warnings: Vec<String>,
        tally: Tally,
        mean_steps_taken: Option<f64>,
        estimate: Option<EstimateReport>,
        runs: Vec<SequentialRun>,
    },
}

pub fn warning_strings(warnings: &[ValidationWarning]) -> Vec<String> {
    warnings.iter().map(ToString::to_string).collect()
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<(), ExportError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read, T: DeserializeOwned>(input: R) -> Result<T, ExportError> {
    Ok(serde_json::from_reader(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{load_dataset, DatasetId};
    use crate::model::classify;
    use crate::scenarios::{preset, run_independent_scenario};
    use crate::stats::MeanTally;

    fn classified(id: DatasetId) -> Vec<(MoveRecord, Outcome)> {
        let ds = load_dataset(id);
        ds.rows
            .iter()
            .map(|r| (*r, classify(r, &ds.layout)))
            .collect()
    }

    #[test]
    fn table_1_csv() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &classified(DatasetId::Table1)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "step,mn0_init,mn0_new,mn1_init,mn1_new,outcome");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("5,14,19,55,50,"));
        assert_eq!(lines[1], "5,14,19,55,50,no_overlap");
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step,mn0_init,mn0_new,mn1_init,mn1_new,outcome\n"
        );
    }

    #[test]
    fn csv_reads_back() {
        let moves = classified(DatasetId::Table5);
        let mut buf = Vec::new();
        write_csv(&mut buf, &moves).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, moves.iter().map(|m| m.0).collect::<Vec<_>>());
        let no_outcome = "step,mn0_init,mn0_new,mn1_init,mn1_new\n5,14,19,55,50\n";
        assert_eq!(read_csv(no_outcome.as_bytes()).unwrap().len(), 1);
    }

    #[test]
    fn csv_rejects_inconsistent_rows() {
        let bad = "step,mn0_init,mn0_new,mn1_init,mn1_new\n48,177,225,333,282\n";
        assert!(matches!(
            read_csv(bad.as_bytes()),
            Err(ExportError::Inconsistent { row: 1, .. })
        ));
        assert!(read_csv("step,mn0_init\nx,1\n".as_bytes()).is_err());
    }

    #[test]
    fn json_round_trip_is_stable() {
        let ScenarioConfig::Independent(mut c) = preset(2).unwrap() else {
            panic!()
        };
        c.samples = 2;
        let samples = run_independent_scenario(&c).unwrap();
        let tallies: Vec<_> = samples.iter().map(|s| s.tally).collect();
        let results = RunResults::Independent {
            config: ScenarioConfig::Independent(c),
            warnings: vec![],
            mean: MeanTally::of(&tallies),
            samples,
            estimate: None,
        };
        let mut a = Vec::new();
        write_json(&mut a, &results).unwrap();
        let back: RunResults = read_json(a.as_slice()).unwrap();
        assert_eq!(back, results);
        let mut b = Vec::new();
        write_json(&mut b, &back).unwrap();
        assert_eq!(a, b);
    }
}
