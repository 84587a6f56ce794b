use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use simulmob_core::datasets::{load_dataset, DatasetId, DatasetShape, ReplayDataset};
use simulmob_core::export::{read_csv, warning_strings, write_csv, write_json, RunResults};
use simulmob_core::model::{classify, MoveRecord, NodeId, Outcome, ZoneLayout};
use simulmob_core::sampling::ValidationWarning;
use simulmob_core::scenarios::{
    mean_steps_taken, preset, replay_independent, replay_sequential, run_independent_scenario,
    run_sequential_scenario, ClassifiedMove, IndependentTrialConfig, SampleResult, ScenarioConfig,
    SequentialConfig, SequentialRun,
};
use simulmob_core::stats::{
    average_step_length, compare, exact_crossing_probability, expected_crossings, round2,
    ComparisonReport, EstimateReport, ExactProbability, MeanTally, Tally,
};
use simulmob_core::trace::format_trace;

use crate::args::{
    Command, EstimateArgs, LayoutArgs, OutputFormat, PlotArgs, ReplayArgs, ScenarioArgs,
    SimulateArgs, SourceArgs,
};
use crate::plot::{render_ascii, render_svg, PlotData};
use crate::render::{mean_cells, tally_cells, tally_table, Table, TALLY_COLUMNS};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(&a, out, err),
        Command::Replay(a) => replay(&a, out),
        Command::Estimate(a) => estimate(&a, out, err),
        Command::Plot(a) => plot(&a, out, err),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("stdout", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(&mut buf, value).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn csv_string(moves: &[(MoveRecord, Outcome)]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, moves).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn apply_layout(base: &ZoneLayout, o: &LayoutArgs) -> Result<ZoneLayout> {
    ZoneLayout::new(
        o.zone0.unwrap_or(base.zone0()),
        o.zone1.unwrap_or(base.zone1()),
        o.brink.unwrap_or(base.brink().x()),
    )
    .map_err(|e| CliError::Usage(e.to_string()))
}

struct Resolved {
    label: String,
    config: ScenarioConfig,
    warnings: Vec<ValidationWarning>,
}

fn resolve_scenario(args: &ScenarioArgs, err: &mut dyn Write) -> Result<Resolved> {
    let (label, mut config) = match (args.scenario, &args.config) {
        (Some(id), None) => (format!("Scenario {id}"), preset(id)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(path.display().to_string(), e))?;
            let config = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
            (format!("Config {}", path.display()), config)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --scenario or --config".into(),
            ))
        }
    };
    {
        let sampler = config.sampler_mut();
        if let Some(seed) = args.seed {
            sampler.seed = seed;
        }
        if let Some(m) = args.max_step {
            sampler.max_step = m;
        }
        sampler.layout = apply_layout(&sampler.layout, &args.layout)?;
    }
    match &mut config {
        ScenarioConfig::Independent(c) => {
            if let Some(r) = args.runs {
                c.runs_per_sample = r;
            }
            if let Some(s) = args.samples {
                c.samples = s;
            }
        }
        ScenarioConfig::Sequential(c) => {
            if let Some(r) = args.runs {
                c.runs = r;
            }
            if args.samples.is_some() {
                let _ = writeln!(
                    err,
                    "warning: --samples has no effect on sequential scenarios"
                );
            }
        }
    }
    let report = config.validate()?;
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(Resolved {
        label,
        config,
        warnings: report.warnings,
    })
}

struct IndependentOutcome {
    samples: Vec<SampleResult>,
    tallies: Vec<Tally>,
    mean: MeanTally,
    estimate: Option<EstimateReport>,
}

fn run_independent(c: &IndependentTrialConfig) -> Result<IndependentOutcome> {
    let samples = run_independent_scenario(c)?;
    let tallies: Vec<Tally> = samples.iter().map(|s| s.tally).collect();
    let mean = MeanTally::of(&tallies);
    let steps: Vec<_> = samples
        .iter()
        .flat_map(|s| s.moves.iter().map(|m| m.record.step))
        .collect();
    let mut total = Tally::default();
    for t in &tallies {
        total += *t;
    }
    let layout = &c.sampler.layout;
    let estimate = average_step_length(&steps).ok().and_then(|avg| {
        EstimateReport::from_average(
            avg,
            layout.zone0().span() as f64,
            total.trials,
            total.mn0_handover,
        )
        .ok()
        .map(|e| {
            e.with_exact(exact_crossing_probability(
                layout,
                c.sampler.max_step,
                NodeId::Mn0,
            ))
        })
    });
    Ok(IndependentOutcome {
        samples,
        tallies,
        mean,
        estimate,
    })
}

struct SequentialOutcome {
    tally: Tally,
    runs: Vec<SequentialRun>,
    mean_steps: Option<f64>,
    estimate: Option<EstimateReport>,
}

fn run_sequential_batch(c: &SequentialConfig) -> Result<SequentialOutcome> {
    let (tally, runs) = run_sequential_scenario(c)?;
    let steps: Vec<_> = runs
        .iter()
        .flat_map(|r| r.records.iter().map(|m| m.step))
        .collect();
    let estimate = average_step_length(&steps).ok().and_then(|avg| {
        EstimateReport::from_average(
            avg,
            c.sampler.layout.zone0().span() as f64,
            tally.trials,
            tally.mn0_handover,
        )
        .ok()
    });
    Ok(SequentialOutcome {
        tally,
        mean_steps: mean_steps_taken(&runs),
        runs,
        estimate,
    })
}

fn layout_line(layout: &ZoneLayout, max_step: u32) -> String {
    format!("Layout: {layout}, max step {max_step}\n")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"))
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let resolved = resolve_scenario(&args.scenario, err)?;
    let sampler = *resolved.config.sampler();
    let layout = sampler.layout;
    match resolved.config {
        ScenarioConfig::Independent(c) => {
            let r = run_independent(&c)?;
            let text = match args.format {
                OutputFormat::Table => {
                    let mut s = format!(
                        "{}: independent trials, {} samples x {} runs, seed {}\n",
                        resolved.label, c.samples, c.runs_per_sample, sampler.seed
                    );
                    s.push_str(&layout_line(&layout, sampler.max_step));
                    s.push('\n');
                    let mut t = tally_table("Sample");
                    for (i, tally) in r.tallies.iter().enumerate() {
                        t.row(
                            std::iter::once((i + 1).to_string())
                                .chain(tally_cells(tally))
                                .collect(),
                        );
                    }
                    t.row(
                        std::iter::once("Mean".to_string())
                            .chain(mean_cells(&r.mean))
                            .collect(),
                    );
                    s.push_str(&t.render());
                    if let Some(e) = &r.estimate {
                        let per_sample = expected_crossings(
                            u64::from(c.runs_per_sample),
                            layout.zone0().span() as f64,
                            e.avg_step,
                        )
                        .ok();
                        s.push('\n');
                        s.push_str(&format!(
                            "Average step length: {:.2} (analytic {:.2})\n",
                            e.avg_step,
                            f64::from(sampler.max_step) / 2.0
                        ));
                        s.push_str(&format!(
                            "Expected steps to cross zone 0 (span {}): {:.2}\n",
                            layout.zone0().span(),
                            e.expected_steps_to_cross
                        ));
                        s.push_str(&format!(
                            "Expected MN_0 crossings per sample: {} (average-step estimator)",
                            fmt_opt(per_sample)
                        ));
                        if let Some(p) = e.exact_probability {
                            s.push_str(&format!(
                                ", {:.2} (exact P = {p})",
                                p.as_f64() * f64::from(c.runs_per_sample)
                            ));
                        }
                        s.push('\n');
                        s.push_str(&format!(
                            "Observed MN_0 handover per sample: {:.2}\n",
                            r.mean.mn0_handover
                        ));
                    }
                    s
                }
                OutputFormat::Csv => {
                    let moves: Vec<_> = r
                        .samples
                        .iter()
                        .flat_map(|s| s.moves.iter().map(|m| (m.record, m.outcome)))
                        .collect();
                    csv_string(&moves)?
                }
                OutputFormat::Json => json_string(&RunResults::Independent {
                    config: resolved.config,
                    warnings: warning_strings(&resolved.warnings),
                    samples: r.samples.clone(),
                    mean: r.mean,
                    estimate: r.estimate,
                })?,
            };
            emit(out, &text)?;
            if let Some(path) = &args.trace {
                let blocks: Vec<String> = r
                    .samples
                    .iter()
                    .map(|s| format_trace(&records_of(&s.moves), args.step_headers))
                    .collect();
                write_file(path, &join_blocks(&blocks, args.step_headers))?;
            }
            if let Some(path) = &args.plot {
                let first = r
                    .samples
                    .first()
                    .map(|s| records_of(&s.moves))
                    .unwrap_or_default();
                let title = format!("{}, sample 1 (seed {})", resolved.label, sampler.seed);
                let data = PlotData::independent(title, &first, layout.brink().x());
                write_file(path, &render_plot(&data, args.ascii)?)?;
            }
        }
        ScenarioConfig::Sequential(c) => {
            let r = run_sequential_batch(&c)?;
            let text = match args.format {
                OutputFormat::Table => {
                    let mut s = format!(
                        "{}: sequential runs, {} runs, seed {}, step cap {}\n",
                        resolved.label, c.runs, sampler.seed, c.max_steps_cap
                    );
                    s.push_str(&layout_line(&layout, sampler.max_step));
                    s.push_str(&format!(
                        "Starts: MN_0 {}, MN_1 {}\n\n",
                        c.mn0_start, c.mn1_start
                    ));
                    let mut t = tally_table("Runs");
                    t.row(
                        std::iter::once("Total".to_string())
                            .chain(tally_cells(&r.tally))
                            .collect(),
                    );
                    s.push_str(&t.render());
                    s.push('\n');
                    let timed_out = r.runs.iter().filter(|run| run.timed_out).count();
                    s.push_str(&format!(
                        "Mean steps to first handover: {} (timed out: {timed_out})\n",
                        fmt_opt(r.mean_steps)
                    ));
                    s.push_str(&format!(
                        "Simultaneous handover fraction: {:.3}\n",
                        r.tally.simultaneous as f64 / r.tally.trials as f64
                    ));
                    if let Some(e) = &r.estimate {
                        s.push_str(&format!("Average step length: {:.2}\n", e.avg_step));
                        s.push_str(&format!(
                            "Expected steps to cross zone 0 (span {}): {:.2}\n",
                            layout.zone0().span(),
                            e.expected_steps_to_cross
                        ));
                    }
                    s
                }
                OutputFormat::Csv => {
                    let moves: Vec<_> = r
                        .runs
                        .iter()
                        .flat_map(|run| {
                            run.records.iter().map(|rec| (*rec, classify(rec, &layout)))
                        })
                        .collect();
                    csv_string(&moves)?
                }
                OutputFormat::Json => json_string(&RunResults::Sequential {
                    config: resolved.config,
                    warnings: warning_strings(&resolved.warnings),
                    tally: r.tally,
                    mean_steps_taken: r.mean_steps,
                    estimate: r.estimate,
                    runs: r.runs.clone(),
                })?,
            };
            emit(out, &text)?;
            if let Some(path) = &args.trace {
                let blocks: Vec<String> = r
                    .runs
                    .iter()
                    .map(|run| format_trace(&run.records, args.step_headers))
                    .collect();
                write_file(path, &join_blocks(&blocks, args.step_headers))?;
            }
            if let Some(path) = &args.plot {
                let first = r
                    .runs
                    .first()
                    .map(|run| run.records.clone())
                    .unwrap_or_default();
                let title = format!("{}, run 1 (seed {})", resolved.label, sampler.seed);
                let data = PlotData::sequential(title, &first, layout.brink().x());
                write_file(path, &render_plot(&data, args.ascii)?)?;
            }
        }
    }
    Ok(())
}

fn records_of(moves: &[ClassifiedMove]) -> Vec<MoveRecord> {
    moves.iter().map(|m| m.record).collect()
}

fn join_blocks(blocks: &[String], step_headers: bool) -> String {
    blocks.join(if step_headers { "\n" } else { "" })
}

fn render_plot(data: &PlotData, ascii: bool) -> Result<String> {
    if data.is_empty() {
        return Err(CliError::Usage(
            "nothing to plot: the record source is empty".into(),
        ));
    }
    Ok(if ascii {
        render_ascii(data)
    } else {
        render_svg(data)
    })
}

/// Rows to replay, estimate or plot.
struct Source {
    label: String,
    shape: DatasetShape,
    layout: ZoneLayout,
    rows: Vec<MoveRecord>,
    dataset: Option<ReplayDataset>,
}

fn load_source(src: &SourceArgs, overrides: &LayoutArgs) -> Result<Source> {
    match (&src.dataset, &src.input) {
        (Some(id), None) => {
            let id: DatasetId =
                id.parse()
                    .map_err(|e: simulmob_core::datasets::UnknownDataset| {
                        CliError::Usage(e.to_string())
                    })?;
            let ds = load_dataset(id);
            Ok(Source {
                label: id.to_string(),
                shape: ds.shape,
                layout: apply_layout(&ds.layout, overrides)?,
                rows: ds.rows.clone(),
                dataset: Some(ds),
            })
        }
        (None, Some(path)) => {
            let (Some(z0), Some(z1), Some(brink)) =
                (overrides.zone0, overrides.zone1, overrides.brink)
            else {
                return Err(CliError::Usage(
                    "--input needs --zone0, --zone1 and --brink".into(),
                ));
            };
            let layout =
                ZoneLayout::new(z0, z1, brink).map_err(|e| CliError::Usage(e.to_string()))?;
            let file =
                fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            let rows =
                read_csv(file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Ok(Source {
                label: path.display().to_string(),
                shape: if src.sequential {
                    DatasetShape::Sequential
                } else {
                    DatasetShape::Independent
                },
                layout,
                rows,
                dataset: None,
            })
        }
        _ => Err(CliError::Usage(
            "give exactly one of --dataset or --input".into(),
        )),
    }
}

#[derive(Debug, Serialize)]
struct DiffRow {
    column: &'static str,
    replay: u64,
    published: u64,
    status: &'static str,
    note: Option<&'static str>,
}

fn diff_against_published(ds: &ReplayDataset, tally: &Tally) -> Vec<DiffRow> {
    let Some(p) = ds.published else {
        return Vec::new();
    };
    let replay = [
        tally.mn0_only,
        tally.mn0_handover,
        tally.mn1_only,
        tally.mn1_handover,
        tally.simultaneous,
        tally.no_overlap,
        tally.simultaneous,
    ];
    let published = [
        p.mn0_overlaps,
        p.mn0_handover,
        p.mn1_overlaps,
        p.mn1_handover,
        p.simultaneous_overlap,
        p.no_overlap,
        p.simultaneous_handover,
    ];
    TALLY_COLUMNS
        .iter()
        .zip(replay.iter().zip(published))
        .map(|(&column, (&replay, published))| {
            let known = ds.known_discrepancies.iter().find(|d| d.column == column);
            let status = match (replay == published, known) {
                (true, _) => "match",
                (false, Some(_)) => "known discrepancy",
                (false, None) => "MISMATCH",
            };
            DiffRow {
                column,
                replay,
                published,
                status,
                note: if replay == published {
                    None
                } else {
                    known.map(|d| d.note)
                },
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Terminal {
    outcome: Outcome,
    step: u32,
    mn0: i64,
    mn1: i64,
    timed_out: bool,
    ignored_rows: usize,
}

#[derive(Debug, Serialize)]
struct ReplayReport {
    source: String,
    shape: DatasetShape,
    layout: ZoneLayout,
    tally: Tally,
    terminal: Option<Terminal>,
    comparison: Vec<DiffRow>,
    notes: Vec<&'static str>,
    rows: Vec<ClassifiedMove>,
}

fn replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<()> {
    let src = load_source(&args.source, &args.layout)?;
    if src.rows.is_empty() {
        return Err(CliError::Usage(format!("{}: no rows to replay", src.label)));
    }
    let (tally, rows, terminal) = match src.shape {
        DatasetShape::Independent => {
            let (tally, moves) = replay_independent(&src.rows, &src.layout);
            (tally, moves, None)
        }
        DatasetShape::Sequential => {
            let run = replay_sequential(&src.rows, &src.layout).expect("rows are non-empty");
            let tally: Tally = std::iter::once(run.terminal).collect();
            let (mn0, mn1) = run
                .final_positions()
                .expect("a replayed run has at least one record");
            let moves = src
                .rows
                .iter()
                .map(|r| ClassifiedMove {
                    record: *r,
                    outcome: classify(r, &src.layout),
                })
                .collect();
            let terminal = Terminal {
                outcome: run.terminal,
                step: run.steps_taken,
                mn0: mn0.x(),
                mn1: mn1.x(),
                timed_out: run.timed_out,
                ignored_rows: src.rows.len() - run.records.len(),
            };
            (tally, moves, Some(terminal))
        }
    };
    let comparison = src
        .dataset
        .as_ref()
        .map(|ds| diff_against_published(ds, &tally))
        .unwrap_or_default();
    let notes = src
        .dataset
        .as_ref()
        .map(|ds| ds.notes.clone())
        .unwrap_or_default();

    let text = match args.format {
        OutputFormat::Table => {
            let mut s = format!(
                "Replay of {} ({} rows)\nLayout: {}\n\n",
                src.label,
                src.rows.len(),
                src.layout
            );
            if let Some(term) = &terminal {
                let mut t = Table::new([
                    "Step",
                    "Length",
                    "MN_0 init",
                    "MN_0 new",
                    "MN_1 init",
                    "MN_1 new",
                    "Outcome",
                ]);
                for (k, m) in rows.iter().enumerate() {
                    let r = m.record;
                    t.row(vec![
                        format!("STEP-{}", k + 1),
                        r.step.to_string(),
                        r.mn0_init.to_string(),
                        r.mn0_new.to_string(),
                        r.mn1_init.to_string(),
                        r.mn1_new.to_string(),
                        m.outcome.to_string(),
                    ]);
                }
                s.push_str(&t.render());
                s.push('\n');
                if term.timed_out {
                    s.push_str(&format!(
                        "Terminal: no handover within {} steps\n",
                        term.step
                    ));
                } else {
                    s.push_str(&format!(
                        "Terminal: {} at step {}, final positions MN_0 {}, MN_1 {}\n",
                        term.outcome, term.step, term.mn0, term.mn1
                    ));
                }
                if term.ignored_rows > 0 {
                    s.push_str(&format!(
                        "{} rows after the first handover ignored\n",
                        term.ignored_rows
                    ));
                }
                s.push('\n');
            }
            let mut t = tally_table("");
            t.row(
                std::iter::once("Replay".to_string())
                    .chain(tally_cells(&tally))
                    .collect(),
            );
            s.push_str(&t.render());
            if !comparison.is_empty() {
                s.push_str("\nPublished counts\n");
                let mut t = Table::new(["Column", "Replay", "Published", "Status"]);
                for d in &comparison {
                    t.row(vec![
                        d.column.to_string(),
                        d.replay.to_string(),
                        d.published.to_string(),
                        d.status.to_string(),
                    ]);
                }
                s.push_str(&t.render());
                for d in comparison
                    .iter()
                    .filter_map(|d| d.note.map(|n| (d.column, n)))
                {
                    s.push_str(&format!("note ({}): {}\n", d.0, d.1));
                }
            }
            for n in &notes {
                s.push_str(&format!("note: {n}\n"));
            }
            s
        }
        OutputFormat::Csv => {
            let moves: Vec<_> = rows.iter().map(|m| (m.record, m.outcome)).collect();
            csv_string(&moves)?
        }
        OutputFormat::Json => json_string(&ReplayReport {
            source: src.label.clone(),
            shape: src.shape,
            layout: src.layout,
            tally,
            terminal,
            comparison,
            notes,
            rows: rows.clone(),
        })?,
    };
    emit(out, &text)?;
    if let Some(path) = &args.trace {
        write_file(path, &format_trace(&src.rows, args.step_headers))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EstimateView {
    source: String,
    layout: ZoneLayout,
    max_step: u32,
    trials: u64,
    zone_span: i64,
    /// Average-step estimator driven by the realized mean step.
    realized_estimator: EstimateReport,
    /// The same estimator driven by the analytic mean step `max_step / 2`.
    analytic_estimator: Option<EstimateReport>,
    published_avg_step: Option<f64>,
    exact_mn0: ExactProbability,
    exact_mn1: ExactProbability,
    exact_expected_mn0: f64,
    exact_expected_mn1: f64,
    observed: Tally,
    comparison: ComparisonReport,
    mean_steps_taken: Option<f64>,
}

fn estimate(args: &EstimateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let view = match (args.source.is_set(), args.scenario.is_set()) {
        (true, false) => {
            let src = load_source(&args.source, &args.scenario.layout)?;
            let max_step = args.scenario.max_step.unwrap_or(50);
            let tally: Tally = src.rows.iter().map(|r| classify(r, &src.layout)).collect();
            let steps: Vec<_> = src.rows.iter().map(|r| r.step).collect();
            let published = src
                .dataset
                .as_ref()
                .and_then(|d| d.published_step_sum)
                .map(|(sum, runs)| sum / f64::from(runs));
            build_estimate(
                src.label, src.layout, max_step, &steps, tally, published, None,
            )?
        }
        (false, true) => {
            let resolved = resolve_scenario(&args.scenario, err)?;
            let sampler = *resolved.config.sampler();
            match resolved.config {
                ScenarioConfig::Independent(c) => {
                    let r = run_independent(&c)?;
                    let mut total = Tally::default();
                    for t in &r.tallies {
                        total += *t;
                    }
                    let steps: Vec<_> = r
                        .samples
                        .iter()
                        .flat_map(|s| s.moves.iter().map(|m| m.record.step))
                        .collect();
                    build_estimate(
                        resolved.label,
                        sampler.layout,
                        sampler.max_step,
                        &steps,
                        total,
                        None,
                        None,
                    )?
                }
                ScenarioConfig::Sequential(c) => {
                    let r = run_sequential_batch(&c)?;
                    let steps: Vec<_> = r
                        .runs
                        .iter()
                        .flat_map(|run| run.records.iter().map(|m| m.step))
                        .collect();
                    build_estimate(
                        resolved.label,
                        sampler.layout,
                        sampler.max_step,
                        &steps,
                        r.tally,
                        None,
                        Some(r.mean_steps),
                    )?
                }
            }
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one source: --dataset, --input, --scenario or --config".into(),
            ))
        }
    };
    let text = match args.format {
        OutputFormat::Json => json_string(&view)?,
        OutputFormat::Table | OutputFormat::Csv => {
            let rows = estimate_rows(&view);
            if args.format == OutputFormat::Csv {
                let mut s = String::from("quantity,value\n");
                for (k, v) in rows {
                    s.push_str(&format!("{k},{v}\n"));
                }
                s
            } else {
                let mut s = format!("Estimate for {}\nLayout: {}\n\n", view.source, view.layout);
                let mut t = Table::new(["Quantity", "Value"]);
                for (k, v) in rows {
                    t.row(vec![k, v]);
                }
                s.push_str(&t.render());
                s.push_str("\nEstimated vs. observed crossings\n");
                let mut t = Table::new(["Metric", "Expected", "Observed", "Abs diff", "Rel diff"]);
                for row in &view.comparison.rows {
                    t.row(vec![
                        row.metric.clone(),
                        format!("{:.2}", row.expected),
                        row.observed.to_string(),
                        format!("{:.2}", row.abs_diff),
                        fmt_opt(row.rel_diff),
                    ]);
                }
                s.push_str(&t.render());
                s
            }
        }
    };
    emit(out, &text)
}

fn build_estimate(
    source: String,
    layout: ZoneLayout,
    max_step: u32,
    steps: &[simulmob_core::StepLength],
    observed: Tally,
    published_avg_step: Option<f64>,
    mean_steps: Option<Option<f64>>,
) -> Result<EstimateView> {
    let avg = average_step_length(steps).map_err(|e| CliError::Usage(e.to_string()))?;
    let span = layout.zone0().span();
    let exact_mn0 = exact_crossing_probability(&layout, max_step, NodeId::Mn0);
    let exact_mn1 = exact_crossing_probability(&layout, max_step, NodeId::Mn1);
    let trials = observed.trials;
    let realized = EstimateReport::from_average(avg, span as f64, trials, observed.mn0_handover)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_exact(exact_mn0);
    let analytic = EstimateReport::from_average(
        f64::from(max_step) / 2.0,
        span as f64,
        trials,
        observed.mn0_handover,
    )
    .ok()
    .map(|e| e.with_exact(exact_mn0));
    Ok(EstimateView {
        source,
        layout,
        max_step,
        trials,
        zone_span: span,
        comparison: compare(&realized, &observed),
        realized_estimator: realized,
        analytic_estimator: analytic,
        published_avg_step,
        exact_expected_mn0: exact_mn0.as_f64() * trials as f64,
        exact_expected_mn1: exact_mn1.as_f64() * trials as f64,
        exact_mn0,
        exact_mn1,
        observed,
        mean_steps_taken: mean_steps.flatten(),
    })
}

fn estimate_rows(v: &EstimateView) -> Vec<(String, String)> {
    let mut rows = vec![
        ("trials".to_string(), v.trials.to_string()),
        (
            "avg step length".into(),
            format!("{:.2}", round2(v.realized_estimator.avg_step)),
        ),
    ];
    if let Some(p) = v.published_avg_step {
        rows.push(("published avg step length".into(), format!("{p:.2}")));
    }
    rows.extend([
        (
            format!("expected steps to cross (span {})", v.zone_span),
            format!("{:.2}", v.realized_estimator.expected_steps_to_cross),
        ),
        (
            "expected crossings".into(),
            format!("{:.2}", v.realized_estimator.expected_crossings),
        ),
    ]);
    if let Some(a) = &v.analytic_estimator {
        rows.extend([
            (
                "analytic avg step length".into(),
                format!("{:.2}", a.avg_step),
            ),
            (
                "analytic expected steps to cross".into(),
                format!("{:.2}", a.expected_steps_to_cross),
            ),
            (
                "analytic expected crossings".into(),
                format!("{:.2}", a.expected_crossings),
            ),
        ]);
    }
    rows.extend([
        (
            format!("exact P(MN_0 crosses), max step {}", v.max_step),
            format!("{} = {:.4}", v.exact_mn0, v.exact_mn0.as_f64()),
        ),
        (
            format!("exact P(MN_1 crosses), max step {}", v.max_step),
            format!("{} = {:.4}", v.exact_mn1, v.exact_mn1.as_f64()),
        ),
        (
            "exact expected MN_0 crossings".into(),
            format!("{:.2}", v.exact_expected_mn0),
        ),
        (
            "exact expected MN_1 crossings".into(),
            format!("{:.2}", v.exact_expected_mn1),
        ),
        (
            "observed MN_0 handover".into(),
            v.observed.mn0_handover.to_string(),
        ),
        (
            "observed MN_1 handover".into(),
            v.observed.mn1_handover.to_string(),
        ),
        (
            "observed simultaneous handover".into(),
            v.observed.simultaneous.to_string(),
        ),
        (
            "observed any overlap".into(),
            v.observed.any_overlap().to_string(),
        ),
    ]);
    if let Some(m) = v.mean_steps_taken {
        rows.push(("mean steps to first handover".into(), format!("{m:.2}")));
        rows.push((
            "simultaneous handover fraction".into(),
            format!(
                "{:.3}",
                v.observed.simultaneous as f64 / v.observed.trials as f64
            ),
        ));
    }
    rows
}

fn plot(args: &PlotArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = match (args.source.is_set(), args.scenario.is_set()) {
        (true, false) => {
            let src = load_source(&args.source, &args.scenario.layout)?;
            let title = format!("{} (brink {})", src.label, src.layout.brink());
            match src.shape {
                DatasetShape::Independent => {
                    PlotData::independent(title, &src.rows, src.layout.brink().x())
                }
                DatasetShape::Sequential => {
                    PlotData::sequential(title, &src.rows, src.layout.brink().x())
                }
            }
        }
        (false, true) => {
            let resolved = resolve_scenario(&args.scenario, err)?;
            let sampler = *resolved.config.sampler();
            let brink = sampler.layout.brink().x();
            match resolved.config {
                ScenarioConfig::Independent(c) => {
                    let r = run_independent(&c)?;
                    let first = r
                        .samples
                        .first()
                        .map(|s| records_of(&s.moves))
                        .unwrap_or_default();
                    PlotData::independent(
                        format!("{}, sample 1 (seed {})", resolved.label, sampler.seed),
                        &first,
                        brink,
                    )
                }
                ScenarioConfig::Sequential(c) => {
                    let r = run_sequential_batch(&c)?;
                    let first = r
                        .runs
                        .first()
                        .map(|run| run.records.clone())
                        .unwrap_or_default();
                    PlotData::sequential(
                        format!("{}, run 1 (seed {})", resolved.label, sampler.seed),
                        &first,
                        brink,
                    )
                }
            }
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one source: --dataset, --input, --scenario or --config".into(),
            ))
        }
    };
    let text = render_plot(&data, args.ascii)?;
    match &args.output {
        Some(path) => write_file(path, &text),
        None => emit(out, &text),
    }
}
