//! Static position plots: SVG or an ASCII grid.

use std::fmt::Write as _;

use simulmob_core::MoveRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: &'static str,
    pub color: &'static str,
    pub glyph: char,
    pub points: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub title: String,
    pub x_label: &'static str,
    /// Draw each series as a connected path instead of markers.
    pub connected: bool,
    pub brink: i64,
    pub series: [Series; 2],
}

impl PlotData {
    /// Independent moves: the new positions of both nodes, one column per move.
    pub fn independent(title: impl Into<String>, records: &[MoveRecord], brink: i64) -> Self {
        let pts = |f: fn(&MoveRecord) -> i64| -> Vec<(usize, i64)> {
            records
                .iter()
                .enumerate()
                .map(|(k, r)| (k + 1, f(r)))
                .collect()
        };
        Self {
            title: title.into(),
            x_label: "run",
            connected: false,
            brink,
            series: [
                series_mn0(pts(|r| r.mn0_new.x())),
                series_mn1(pts(|r| r.mn1_new.x())),
            ],
        }
    }

    /// A chained walk: starting positions at step 0, then each new position.
    pub fn sequential(title: impl Into<String>, records: &[MoveRecord], brink: i64) -> Self {
        let path =
            |start: fn(&MoveRecord) -> i64, new: fn(&MoveRecord) -> i64| -> Vec<(usize, i64)> {
                records
                    .first()
                    .map(|r| (0, start(r)))
                    .into_iter()
                    .chain(records.iter().enumerate().map(|(k, r)| (k + 1, new(r))))
                    .collect()
            };
        Self {
            title: title.into(),
            x_label: "step",
            connected: true,
            brink,
            series: [
                series_mn0(path(|r| r.mn0_init.x(), |r| r.mn0_new.x())),
                series_mn1(path(|r| r.mn1_init.x(), |r| r.mn1_new.x())),
            ],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.series.iter().all(|s| s.points.is_empty())
    }

    fn x_range(&self) -> (usize, usize) {
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0));
        let lo = xs.clone().min().unwrap_or(0);
        let hi = xs.max().unwrap_or(1);
        (lo, hi.max(lo + 1))
    }

    fn y_range(&self) -> (i64, i64) {
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(std::iter::once(self.brink));
        let lo = ys.clone().min().unwrap_or(0);
        let hi = ys.max().unwrap_or(1);
        let pad = ((hi - lo) / 20).max(1);
        (lo - pad, hi + pad)
    }
}

fn series_mn0(points: Vec<(usize, i64)>) -> Series {
    Series {
        label: "MN_0",
        color: "#1f77b4",
        glyph: '0',
        points,
    }
}

fn series_mn1(points: Vec<(usize, i64)>) -> Series {
    Series {
        label: "MN_1",
        color: "#d62728",
        glyph: '1',
        points,
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render_svg(data: &PlotData) -> String {
    let (x0, x1) = data.x_range();
    let (y0, y1) = data.y_range();
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: usize| LEFT + (x - x0) as f64 / (x1 - x0) as f64 * plot_w;
    let sy = |y: i64| TOP + (y1 - y) as f64 / (y1 - y0) as f64 * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&data.title)
    );
    // axes
    let _ = writeln!(
        out,
        r#"<path d="M{:.2},{:.2} V{:.2} H{:.2}" stroke="black" fill="none"/>"#,
        LEFT,
        TOP,
        TOP + plot_h,
        LEFT + plot_w
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        data.x_label
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">x position</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for y in [y0, (y0 + y1) / 2, y1] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{y}</text>"#,
            LEFT - 6.0,
            sy(y)
        );
    }
    for x in [x0, (x0 + x1) / 2, x1] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            sx(x),
            TOP + plot_h + 16.0
        );
    }
    // brink plane
    let by = sy(data.brink);
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{by:.2}" x2="{:.2}" y2="{by:.2}" stroke="#555" stroke-dasharray="6 4"/>"##,
        LEFT,
        LEFT + plot_w
    );
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#555">brink {}</text>"##,
        LEFT + plot_w,
        by - 4.0,
        data.brink
    );
    for s in &data.series {
        if data.connected && s.points.len() > 1 {
            let d: Vec<String> = s
                .points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| {
                    format!(
                        "{}{:.2},{:.2}",
                        if i == 0 { 'M' } else { 'L' },
                        sx(x),
                        sy(y)
                    )
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<path d="{}" stroke="{}" stroke-width="1.5" fill="none"/>"#,
                d.join(" "),
                s.color
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                sx(x),
                sy(y),
                s.color
            );
        }
    }
    for (i, s) in data.series.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"/><text x="{:.2}" y="{:.2}" dominant-baseline="middle">{}</text>"#,
            LEFT + 14.0,
            y,
            s.color,
            LEFT + 24.0,
            y,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

const ASCII_ROWS: usize = 20;

/// One column per x value, `ASCII_ROWS` rows. `0`/`1` mark the nodes, `*`
/// both in one cell, `-` the brink row.
pub fn render_ascii(data: &PlotData) -> String {
    let (x0, x1) = data.x_range();
    let (y0, y1) = data.y_range();
    let cols = x1 - x0 + 1;
    let row_of = |y: i64| -> usize {
        let t = (y1 - y) as f64 / (y1 - y0) as f64;
        ((t * (ASCII_ROWS - 1) as f64).round() as usize).min(ASCII_ROWS - 1)
    };
    let mut grid = vec![vec![' '; cols]; ASCII_ROWS];
    let brink_row = row_of(data.brink);
    grid[brink_row].iter_mut().for_each(|c| *c = '-');
    for s in &data.series {
        for &(x, y) in &s.points {
            let cell = &mut grid[row_of(y)][x - x0];
            *cell = match *cell {
                ' ' | '-' => s.glyph,
                c if c == s.glyph => c,
                _ => '*',
            };
        }
    }
    let label_width = y0.to_string().len().max(y1.to_string().len());
    let mut out = String::new();
    let _ = writeln!(out, "{}", data.title);
    for (r, row) in grid.iter().enumerate() {
        let label = if r == 0 {
            y1.to_string()
        } else if r == ASCII_ROWS - 1 {
            y0.to_string()
        } else if r == brink_row {
            data.brink.to_string()
        } else {
            String::new()
        };
        let line: String = row.iter().collect();
        let _ = writeln!(out, "{label:>label_width$} |{}", line.trim_end());
    }
    let _ = writeln!(out, "{:>label_width$} +{}", "", "-".repeat(cols));
    let _ = writeln!(
        out,
        "{:>label_width$}  {} {x0}..{x1}; 0 = MN_0, 1 = MN_1, * = both, - = brink {}",
        "", data.x_label, data.brink
    );
    out
}
