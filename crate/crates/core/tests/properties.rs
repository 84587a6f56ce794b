use proptest::prelude::*;

use simulmob_core::model::{
    classify, MoveRecord, NodeId, Outcome, Position, StepLength, ZoneLayout, ZoneRange,
};
use simulmob_core::sampling::{MoveSource, Sampler, SamplerConfig};
use simulmob_core::scenarios::{run_sequential, SequentialConfig};
use simulmob_core::trace::{format_trace_line, parse_trace_line};

fn layouts() -> impl Strategy<Value = ZoneLayout> {
    (-500i64..500, 0i64..300, 1i64..10, 0i64..300).prop_map(|(lo, w0, gap, w1)| {
        let hi0 = lo + w0;
        let brink = hi0 + gap;
        let lo1 = brink + gap;
        ZoneLayout::new(
            ZoneRange::new(lo, hi0),
            ZoneRange::new(lo1, lo1 + w1),
            brink,
        )
        .unwrap()
    })
}

fn positions(layout: ZoneLayout) -> impl Strategy<Value = (ZoneLayout, Position, Position)> {
    let z0 = layout.zone0();
    let z1 = layout.zone1();
    (z0.lo..=z0.hi, z1.lo..=z1.hi).prop_map(move |(a, b)| (layout, Position(a), Position(b)))
}

proptest! {
    #[test]
    fn draws_respect_bounds(seed: u64, max_step in 0u32..200, layout in layouts()) {
        let mut s = Sampler::new(&SamplerConfig::new(seed, max_step, layout));
        for _ in 0..64 {
            let (p0, p1) = s.draw_init_positions();
            prop_assert!(layout.zone0().contains(p0));
            prop_assert!(layout.zone1().contains(p1));
            prop_assert!(s.draw_step().get() <= max_step);
        }
    }

    #[test]
    fn classification_is_monotone_in_step(
        (layout, p0, p1) in layouts().prop_flat_map(positions),
        s in 0u32..200,
        extra in 0u32..200,
    ) {
        let small = classify(&MoveRecord::new(StepLength(s), p0, p1), &layout);
        let big = classify(&MoveRecord::new(StepLength(s + extra), p0, p1), &layout);
        prop_assert!(!small.mn0_crossed() || big.mn0_crossed());
        prop_assert!(!small.mn1_crossed() || big.mn1_crossed());
        if small == Outcome::SimultaneousOverlap {
            prop_assert_eq!(big, Outcome::SimultaneousOverlap);
        }
    }

    #[test]
    fn mirror_swaps_roles(
        (layout, p0, p1) in layouts().prop_flat_map(positions),
        s in 0u32..200,
    ) {
        let rec = MoveRecord::new(StepLength(s), p0, p1);
        let mirrored = rec.mirrored(&layout);
        prop_assert!(mirrored.is_consistent());
        prop_assert_eq!(classify(&mirrored, &layout.mirrored()), classify(&rec, &layout).swapped());
    }

    #[test]
    fn trace_lines_round_trip(x0 in -10_000i64..10_000, x1 in -10_000i64..10_000, s in 0u32..10_000) {
        let rec = MoveRecord::new(StepLength(s), Position(x0), Position(x1));
        for node in [NodeId::Mn0, NodeId::Mn1] {
            let line = format_trace_line(&rec, node);
            let f = parse_trace_line(&line).unwrap();
            prop_assert_eq!(f.node, node);
            prop_assert_eq!(f.init, rec.init(node));
            prop_assert_eq!(f.new, rec.new_position(node));
            prop_assert_eq!(f.step, rec.step);
            prop_assert_eq!(f.time_s, rec.time_s);
        }
    }

    #[test]
    fn sequential_runs_telescope(seed: u64, max_step in 0u32..60) {
        let layout = ZoneLayout::new(ZoneRange::new(0, 249), ZoneRange::new(251, 500), 250).unwrap();
        let config = SequentialConfig {
            sampler: SamplerConfig::new(seed, max_step, layout),
            mn0_start: Position(10),
            mn1_start: Position(500),
            runs: 1,
            max_steps_cap: 500,
        };
        let run = run_sequential(&mut Sampler::new(&config.sampler), &config);
        let total: i64 = run.records.iter().map(|r| i64::from(r.step.get())).sum();
        let (f0, f1) = run.final_positions().unwrap();
        prop_assert_eq!(f0.x(), 10 + total);
        prop_assert_eq!(f1.x(), 500 - total);
        prop_assert_eq!(run.timed_out, run.terminal == Outcome::NoOverlap);
        prop_assert!(run.records.iter().all(MoveRecord::is_consistent));
    }
}
