//! Movement trace lines.
//!
//! One line per node per move:
//!
//! ```text
//! M 0.00100 1 (500.00, 00.00), (472.00, 00.00), 28.00
//! ```
//!
//! marker, time in seconds (5 decimals), node id, initial `(x, y)`, new
//! `(x, y)`, step length. A file holds two lines per move, MN_1 first, and may
//! carry `STEP-k` header lines and blank separators between moves.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{MoveRecord, NodeId, Position, StepLength};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// One parsed trace line: half of a [`MoveRecord`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceFragment {
    pub node: NodeId,
    pub time_s: f64,
    pub init: Position,
    pub new: Position,
    pub step: StepLength,
}

fn coord(x: i64) -> String {
    format!("{x}.00")
}

pub fn format_trace_line(rec: &MoveRecord, node: NodeId) -> String {
    format!(
        "M {:.5} {} ({}, 00.00), ({}, 00.00), {}.00",
        rec.time_s,
        node,
        coord(rec.init(node).x()),
        coord(rec.new_position(node).x()),
        rec.step.get()
    )
}

/// Renders moves in file order: for each move the MN_1 line, then MN_0.
pub fn format_trace(records: &[MoveRecord], step_headers: bool) -> String {
    let mut out = String::new();
    for (k, rec) in records.iter().enumerate() {
        if step_headers {
            if k > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "STEP-{}", k + 1);
        }
        out.push_str(&format_trace_line(rec, NodeId::Mn1));
        out.push('\n');
        out.push_str(&format_trace_line(rec, NodeId::Mn0));
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> TraceParseError {
        TraceParseError {
            line: 1,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), TraceParseError> {
        if self.text[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.err(format!("expected {lit:?}")))
        }
    }

    /// `-?digits(.digits)?`, returned with its starting column.
    fn number(&mut self) -> Result<(&'a str, usize), TraceParseError> {
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut end = start;
        if bytes.get(end) == Some(&b'-') {
            end += 1;
        }
        let digits_start = end;
        while bytes.get(end).is_some_and(u8::is_ascii_digit) {
            end += 1;
        }
        if end == digits_start {
            return Err(self.err("expected a number"));
        }
        if bytes.get(end) == Some(&b'.') {
            end += 1;
            let frac_start = end;
            while bytes.get(end).is_some_and(u8::is_ascii_digit) {
                end += 1;
            }
            if end == frac_start {
                self.pos = end;
                return Err(self.err("expected digits after the decimal point"));
            }
        }
        self.pos = end;
        Ok((&self.text[start..end], start + 1))
    }

    fn integral(&mut self, what: &str) -> Result<(i64, usize), TraceParseError> {
        let (s, column) = self.number()?;
        let (int_part, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.bytes().any(|b| b != b'0') {
            return Err(TraceParseError {
                line: 1,
                column,
                message: format!("{what} {s} is not a whole unit"),
            });
        }
        let value = int_part.parse::<i64>().map_err(|e| TraceParseError {
            line: 1,
            column,
            message: format!("{what} {s}: {e}"),
        })?;
        Ok((value, column))
    }

    fn point(&mut self) -> Result<Position, TraceParseError> {
        self.expect("(")?;
        let (x, _) = self.integral("x coordinate")?;
        self.expect(", ")?;
        let (y, column) = self.integral("y coordinate")?;
        if y != 0 {
            return Err(TraceParseError {
                line: 1,
                column,
                message: "y coordinate must be zero".into(),
            });
        }
        self.expect(")")?;
        Ok(Position(x))
    }
}

/// Parses one trace line. Errors carry the 1-based column of the problem;
/// the line number is 1 and is filled in by [`parse_trace`].
pub fn parse_trace_line(line: &str) -> Result<TraceFragment, TraceParseError> {
    let line = line.trim_end_matches(['\r', '\n']);
    let mut c = Cursor { text: line, pos: 0 };
    c.expect("M")?;
    c.expect(" ")?;
    let (time, _) = c.number()?;
    let time_s: f64 = time.parse().map_err(|_| c.err("bad time"))?;
    c.expect(" ")?;
    let node_col = c.pos;
    let (id, _) = c.integral("node id")?;
    let node = u8::try_from(id)
        .ok()
        .and_then(NodeId::from_index)
        .ok_or_else(|| TraceParseError {
            line: 1,
            column: node_col + 1,
            message: format!("node id must be 0 or 1, got {id}"),
        })?;
    c.expect(" ")?;
    let init = c.point()?;
    c.expect(", ")?;
    let new = c.point()?;
    c.expect(", ")?;
    let (step, step_col) = c.integral("step")?;
    if c.pos != line.len() {
        return Err(c.err("trailing characters"));
    }
    let step = u32::try_from(step).map_err(|_| TraceParseError {
        line: 1,
        column: step_col,
        message: format!("step {step} out of range"),
    })?;
    let step = StepLength(step);
    let expected = match node {
        NodeId::Mn0 => init + step,
        NodeId::Mn1 => init - step,
    };
    if new != expected {
        return Err(TraceParseError {
            line: 1,
            column: step_col,
            message: format!("MN_{node} moved {init} -> {new}, which does not match step {step}"),
        });
    }
    Ok(TraceFragment {
        node,
        time_s,
        init,
        new,
        step,
    })
}

/// Parses a whole trace file, skipping blank lines, `STEP-k` headers and
/// `#` comments.
pub fn parse_trace(text: &str) -> Result<Vec<TraceFragment>, TraceParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !(t.is_empty() || t.starts_with("STEP-") || t.starts_with('#'))
        })
        .map(|(i, l)| {
            parse_trace_line(l).map_err(|mut e| {
                e.line = i + 1;
                e
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TracePairError {
    #[error("trace ends with an unpaired line for MN_{0}")]
    Unpaired(NodeId),
    #[error("move {index}: expected one line per node, got two for MN_{node}")]
    DuplicateNode { index: usize, node: NodeId },
    #[error("move {index}: the two lines disagree on step or time")]
    Mismatch { index: usize },
}

/// Joins consecutive line pairs (either node first) back into moves.
pub fn records_from_fragments(
    fragments: &[TraceFragment],
) -> Result<Vec<MoveRecord>, TracePairError> {
    fragments
        .chunks(2)
        .enumerate()
        .map(|(index, pair)| match pair {
            [a, b] => {
                if a.node == b.node {
                    return Err(TracePairError::DuplicateNode {
                        index,
                        node: a.node,
                    });
                }
                if a.step != b.step || a.time_s != b.time_s {
                    return Err(TracePairError::Mismatch { index });
                }
                let (n0, n1) = if a.node == NodeId::Mn0 {
                    (a, b)
                } else {
                    (b, a)
                };
                Ok(MoveRecord {
                    time_s: a.time_s,
                    step: a.step,
                    mn0_init: n0.init,
                    mn0_new: n0.new,
                    mn1_init: n1.init,
                    mn1_new: n1.new,
                })
            }
            [a] => Err(TracePairError::Unpaired(a.node)),
            _ => unreachable!(),
        })
        .collect()
}
