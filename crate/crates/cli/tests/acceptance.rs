//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use simulmob_core::datasets::{load_dataset, DatasetId};
use simulmob_core::model::{
    classify, MoveRecord, NodeId, Position, StepLength, ZoneLayout, ZoneRange,
};
use simulmob_core::sampling::{Sampler, SamplerConfig};
use simulmob_core::scenarios::{
    preset, run_independent_batch, run_sequential_scenario, ScenarioConfig,
};
use simulmob_core::stats::{
    average_step_length, exact_crossing_probability, expected_crossings, expected_steps_to_cross,
    Tally,
};
use simulmob_core::trace::{format_trace_line, parse_trace_line};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_simulmob"));
    cmd.env_remove("SIMULMOB_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn simulmob")
}

fn run_json(args: &[&str]) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = run(args);
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))?;
    Ok((v, elapsed))
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn within(what: &str, got: f64, lo: f64, hi: f64) -> Result<(), String> {
    if (lo..=hi).contains(&got) {
        Ok(())
    } else {
        Err(format!("{what}: {got} outside [{lo}, {hi}]"))
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    within(what, got, want - tol, want + tol)
}

fn tally_field(v: &Value, key: &str) -> u64 {
    v["tally"][key].as_u64().unwrap_or(u64::MAX)
}

fn ac1_table5_replay() -> Check {
    let (v, elapsed) = run_json(&["replay", "--dataset", "table-5", "--format", "json"])?;
    expect_eq("mn0_handover", tally_field(&v, "mn0_handover"), 13)?;
    expect_eq("mn1_handover", tally_field(&v, "mn1_handover"), 7)?;
    expect_eq("simultaneous", tally_field(&v, "simultaneous"), 5)?;
    expect_eq("mn0_only", tally_field(&v, "mn0_only"), 8)?;
    expect_eq("mn1_only", tally_field(&v, "mn1_only"), 2)?;
    expect_eq("no_overlap", tally_field(&v, "no_overlap"), 15)?;
    let noted = v["comparison"].as_array().into_iter().flatten().any(|row| {
        row["column"] == "No overlap"
            && row["published"] == 5
            && row["status"] == "known discrepancy"
    });
    if !noted {
        return Err("no_overlap discrepancy note missing".into());
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("runtime {elapsed:?} >= 1 s"));
    }
    Ok(format!(
        "13/7/5/8/2, no_overlap 15 (printed 5, noted), {elapsed:.0?}"
    ))
}

fn ac2_table3_replay() -> Check {
    let (v, _) = run_json(&["replay", "--dataset", "table-3", "--format", "json"])?;
    expect_eq("mn0 crossings", tally_field(&v, "mn0_handover"), 1)?;
    expect_eq("mn1 crossings", tally_field(&v, "mn1_handover"), 2)?;
    let noted = v["comparison"]
        .as_array()
        .into_iter()
        .flatten()
        .any(|row| row["column"] == "MN_1 handover" && row["status"] == "known discrepancy");
    if !noted {
        return Err("MN_1 discrepancy note missing".into());
    }
    Ok("mn0 1, mn1 2 (printed 1, noted)".into())
}

fn ac3_table6_replay(dir: &Path) -> Check {
    let trace = dir.join("table6.trace");
    let trace_arg = trace.to_str().expect("utf-8 temp path");
    let (v, _) = run_json(&[
        "replay",
        "--dataset",
        "table-6",
        "--format",
        "json",
        "--trace",
        trace_arg,
    ])?;
    let term = &v["terminal"];
    expect_eq("terminal step", term["step"].as_u64(), Some(11))?;
    expect_eq(
        "terminal outcome",
        term["outcome"].as_str(),
        Some("simultaneous_overlap"),
    )?;
    expect_eq(
        "final positions",
        (term["mn0"].as_i64(), term["mn1"].as_i64()),
        (Some(289), Some(221)),
    )?;
    let text = std::fs::read_to_string(&trace).map_err(|e| e.to_string())?;
    let line = "M 0.00100 1 (500.00, 00.00), (472.00, 00.00), 28.00";
    if !text.lines().any(|l| l == line) {
        return Err(format!("trace lacks {line:?}"));
    }
    Ok("step 11, simultaneous, (289, 221), trace line present".into())
}

fn ac4_average_step() -> Check {
    // Thirty published step lengths summing to 638.1.
    let mut published = vec![21.0f64; 29];
    published.push(29.1);
    let avg = average_step_length(&published).map_err(|e| e.to_string())?;
    close("638.1/30", avg, 21.27, 1e-9)?;
    let t5 = load_dataset(DatasetId::Table5);
    let steps: Vec<StepLength> = t5.rows.iter().map(|r| r.step).collect();
    let mean = average_step_length(&steps).map_err(|e| e.to_string())?;
    expect_eq("table-5 mean", mean, 21.5)?;
    Ok(format!("{avg:.10}, table-5 mean {mean}"))
}

fn ac5_estimator() -> Check {
    let e = |w: f64, a: f64| expected_steps_to_cross(w, a).map_err(|e| e.to_string());
    let a = e(374.0, 22.0)?;
    let b = e(49.0, 21.5)?;
    let c = e(249.0, 22.0)?;
    close("374/22", a, 17.0, 0.01)?;
    close("49/21.5", b, 2.279, 0.01)?;
    close("249/22", c, 11.318, 0.01)?;
    let x = expected_crossings(30, 49.0, 21.5).map_err(|e| e.to_string())?;
    within("expected_crossings(30, 49, 21.5)", x, 13.1, 13.3)?;
    Ok(format!("{a:.3}, {b:.3}, {c:.3}; crossings {x:.3}"))
}

fn independent_layout(id: u32) -> (ZoneLayout, SamplerConfig) {
    match preset(id).expect("built-in preset") {
        ScenarioConfig::Independent(c) => (c.sampler.layout, c.sampler),
        ScenarioConfig::Sequential(_) => unreachable!("presets 1 and 2 are independent"),
    }
}

fn ac6_exact_vs_monte_carlo() -> Check {
    let start = Instant::now();
    let mut detail = Vec::new();
    for (id, favorable, total) in [(2u32, 1275u64, 2550u64), (1, 1275, 19125)] {
        let (layout, sampler) = independent_layout(id);
        let p = exact_crossing_probability(&layout, sampler.max_step, NodeId::Mn0);
        expect_eq(
            &format!("preset {id} exact"),
            (p.favorable, p.total),
            (favorable, total),
        )?;
        let n = 100_000u32;
        let mut src = Sampler::new(&sampler);
        let (tally, _) = run_independent_batch(&mut src, &layout, n);
        let freq = tally.mn0_handover as f64 / f64::from(n);
        let pf = p.as_f64();
        let se = (pf * (1.0 - pf) / f64::from(n)).sqrt();
        close(&format!("preset {id} Monte Carlo"), freq, pf, 3.0 * se)?;
        detail.push(format!("preset {id}: {p} vs {freq:.4}"));
        if id == 1 {
            within("30 * P", 30.0 * pf, 1.9, 2.1)?;
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("runtime {elapsed:?} >= 5 s"));
    }
    Ok(format!("{}, {elapsed:.0?}", detail.join("; ")))
}

fn ac7_sequential_statistics() -> Check {
    let ScenarioConfig::Sequential(mut cfg) = preset(3).map_err(|e| e.to_string())? else {
        return Err("preset 3 is not sequential".into());
    };
    cfg.runs = 1000;
    let (tally, runs) = run_sequential_scenario(&cfg).map_err(|e| e.to_string())?;
    let mean = runs.iter().map(|r| f64::from(r.steps_taken)).sum::<f64>() / runs.len() as f64;
    let frac = tally.simultaneous as f64 / tally.trials as f64;
    within("mean steps to handover", mean, 10.0, 12.0)?;
    within("simultaneous fraction", frac, 0.55, 0.78)?;
    Ok(format!(
        "mean steps {mean:.2}, simultaneous fraction {frac:.3}"
    ))
}

fn ac8_determinism(dir: &Path) -> Check {
    let cases: &[(&str, &[&str], Option<&str>)] = &[
        (
            "simulate table",
            &["simulate", "--scenario", "2", "--seed", "42"],
            None,
        ),
        (
            "simulate csv",
            &[
                "simulate",
                "--scenario",
                "1",
                "--seed",
                "42",
                "--format",
                "csv",
            ],
            None,
        ),
        (
            "simulate json",
            &[
                "simulate",
                "--scenario",
                "3",
                "--seed",
                "42",
                "--format",
                "json",
            ],
            None,
        ),
        (
            "simulate trace",
            &[
                "simulate",
                "--scenario",
                "3",
                "--seed",
                "42",
                "--step-headers",
                "--trace",
            ],
            Some("trace"),
        ),
        (
            "simulate svg",
            &["simulate", "--scenario", "2", "--seed", "42", "--plot"],
            Some("svg"),
        ),
        (
            "replay json",
            &["replay", "--dataset", "table-5", "--format", "json"],
            None,
        ),
        (
            "replay trace",
            &["replay", "--dataset", "table-6", "--trace"],
            Some("trace"),
        ),
        (
            "estimate",
            &["estimate", "--scenario", "2", "--seed", "42"],
            None,
        ),
        (
            "plot svg",
            &["plot", "--scenario", "3", "--seed", "42", "-o"],
            Some("svg"),
        ),
    ];
    for (name, args, file) in cases {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            let path =
                file.map(|ext| dir.join(format!("det-{}-{round}.{ext}", name.replace(' ', "-"))));
            if let Some(p) = &path {
                argv.push(p.display().to_string());
            }
            let out = bin().args(&argv).output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{name}: exit {:?}", out.status.code()));
            }
            let file_bytes = match &path {
                Some(p) => std::fs::read(p).map_err(|e| e.to_string())?,
                None => Vec::new(),
            };
            outputs.push((out.stdout, file_bytes));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{name}: outputs differ between runs"));
        }
    }
    Ok(format!("{} command variants byte-identical", cases.len()))
}

fn case_strategy() -> impl Strategy<Value = (ZoneLayout, Position, Position, u32, u32)> {
    (-1000i64..1000, 0i64..400, 1i64..20, 0i64..400)
        .prop_map(|(lo, w0, gap, w1)| {
            let brink = lo + w0 + gap;
            ZoneLayout::new(
                ZoneRange::new(lo, lo + w0),
                ZoneRange::new(brink + gap, brink + gap + w1),
                brink,
            )
            .expect("constructed layout is valid")
        })
        .prop_flat_map(|layout| {
            let (z0, z1) = (layout.zone0(), layout.zone1());
            (
                Just(layout),
                z0.lo..=z0.hi,
                z1.lo..=z1.hi,
                0u32..500,
                0u32..500,
            )
        })
        .prop_map(|(layout, a, b, s, extra)| (layout, Position(a), Position(b), s, extra))
}

fn check_case(
    layout: &ZoneLayout,
    p0: Position,
    p1: Position,
    s: u32,
    extra: u32,
) -> Result<(), TestCaseError> {
    let rec = MoveRecord::new(StepLength(s), p0, p1);
    prop_assert!(rec.is_consistent());
    prop_assert_eq!(rec.mn0_new.x(), p0.x() + i64::from(s));
    prop_assert_eq!(rec.mn1_new.x(), p1.x() - i64::from(s));

    let outcome = classify(&rec, layout);
    let tally: Tally = std::iter::once(outcome).collect();
    prop_assert!(tally.identities_hold());
    let hits = [
        tally.mn0_only,
        tally.mn1_only,
        tally.simultaneous,
        tally.no_overlap,
    ];
    prop_assert_eq!(hits.iter().sum::<u64>(), 1);

    let bigger = classify(&MoveRecord::new(StepLength(s + extra), p0, p1), layout);
    prop_assert!(!outcome.mn0_crossed() || bigger.mn0_crossed());
    prop_assert!(!outcome.mn1_crossed() || bigger.mn1_crossed());

    let mirrored = rec.mirrored(layout);
    prop_assert_eq!(classify(&mirrored, &layout.mirrored()), outcome.swapped());

    for node in [NodeId::Mn0, NodeId::Mn1] {
        let f = parse_trace_line(&format_trace_line(&rec, node))
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(
            (f.node, f.init, f.new, f.step),
            (node, rec.init(node), rec.new_position(node), rec.step)
        );
    }
    Ok(())
}

fn ac9_property_suite() -> Check {
    let cases = 10_000;
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&case_strategy(), |(layout, p0, p1, s, extra)| {
            check_case(&layout, p0, p1, s, extra)
        })
        .map_err(|e| format!("violation: {e}"))?;
    Ok(format!("{cases} cases, 0 violations"))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("AC1 table-5 golden replay", Box::new(ac1_table5_replay)),
        ("AC2 table-3 golden replay", Box::new(ac2_table3_replay)),
        (
            "AC3 table-6 sequential replay",
            Box::new(|| ac3_table6_replay(dir.path())),
        ),
        ("AC4 average step length", Box::new(ac4_average_step)),
        ("AC5 estimator arithmetic", Box::new(ac5_estimator)),
        (
            "AC6 exact enumeration vs Monte Carlo",
            Box::new(ac6_exact_vs_monte_carlo),
        ),
        (
            "AC7 sequential scenario statistics",
            Box::new(ac7_sequential_statistics),
        ),
        ("AC8 determinism", Box::new(|| ac8_determinism(dir.path()))),
        ("AC9 property suite", Box::new(ac9_property_suite)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
