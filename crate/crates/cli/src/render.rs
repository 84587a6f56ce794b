//! Plain-text tables.

use std::fmt::Write as _;

use simulmob_core::stats::{MeanTally, Tally};

/// Summary columns, in the order of the published result tables.
pub const TALLY_COLUMNS: [&str; 7] = [
    "MN_0 overlaps",
    "MN_0 handover",
    "MN_1 overlaps",
    "MN_1 handover",
    "Simultaneous overlap",
    "No overlap",
    "Simultaneous Handover",
];

pub fn tally_cells(t: &Tally) -> Vec<String> {
    [
        t.mn0_only,
        t.mn0_handover,
        t.mn1_only,
        t.mn1_handover,
        t.simultaneous,
        t.no_overlap,
        t.simultaneous,
    ]
    .iter()
    .map(u64::to_string)
    .collect()
}

pub fn mean_cells(m: &MeanTally) -> Vec<String> {
    [
        m.mn0_only,
        m.mn0_handover,
        m.mn1_only,
        m.mn1_handover,
        m.simultaneous,
        m.no_overlap,
        m.simultaneous,
    ]
    .iter()
    .map(|v| format!("{v:.2}"))
    .collect()
}

/// Right-aligned columns except the first, which is left-aligned.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn render(&self) -> String {
        let ncols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate().take(ncols) {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let mut s = String::new();
            for (i, w) in widths.iter().enumerate() {
                let cell = cells.get(i).map(String::as_str).unwrap_or("");
                if i > 0 {
                    s.push_str("  ");
                }
                if i == 0 {
                    let _ = write!(s, "{cell:<w$}");
                } else {
                    let _ = write!(s, "{cell:>w$}");
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&self.header));
        out.push('\n');
        let total: usize = widths.iter().sum::<usize>() + 2 * (ncols.saturating_sub(1));
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

/// A tally table: label column followed by the seven summary columns.
pub fn tally_table(label: &str) -> Table {
    Table::new(std::iter::once(label).chain(TALLY_COLUMNS))
}
