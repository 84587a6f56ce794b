use simulmob_core::datasets::{load_dataset, DatasetId};
use simulmob_core::model::{classify, Outcome, Position};
use simulmob_core::scenarios::{replay_independent, replay_sequential};
use simulmob_core::stats::{average_step_length, Tally};

#[test]
fn table_5_reproduces_table_4_counts() {
    let ds = load_dataset(DatasetId::Table5);
    let (tally, _) = replay_independent(&ds.rows, &ds.layout);
    assert_eq!(
        tally,
        Tally {
            mn0_only: 8,
            mn1_only: 2,
            simultaneous: 5,
            no_overlap: 15,
            mn0_handover: 13,
            mn1_handover: 7,
            trials: 30,
        }
    );
}

#[test]
fn table_5_touching_rows_count() {
    let ds = load_dataset(DatasetId::Table5);
    // step 10: 90 -> 100 reaches the brink exactly
    assert_eq!(classify(&ds.rows[4], &ds.layout), Outcome::Mn0Overlap);
    // step 45: MN_1 145 -> 100 reaches it from the other side
    assert_eq!(
        classify(&ds.rows[25], &ds.layout),
        Outcome::SimultaneousOverlap
    );
}

#[test]
fn table_3_crossings() {
    let ds = load_dataset(DatasetId::Table3);
    let (tally, moves) = replay_independent(&ds.rows, &ds.layout);
    assert_eq!(tally.mn0_handover, 1);
    assert_eq!(tally.mn1_handover, 2);
    assert_eq!(tally.simultaneous, 0);
    assert_eq!(tally.no_overlap, 28);
    let mn0: Vec<_> = moves
        .iter()
        .filter(|m| m.outcome == Outcome::Mn0Overlap)
        .collect();
    assert_eq!(mn0[0].record.mn0_new, Position(384));
}

#[test]
fn table_6_ends_in_simultaneous_handover() {
    let ds = load_dataset(DatasetId::Table6);
    let run = replay_sequential(&ds.rows, &ds.layout).unwrap();
    assert_eq!(run.steps_taken, 11);
    assert_eq!(run.terminal, Outcome::SimultaneousOverlap);
    assert!(!run.timed_out);
    assert_eq!(run.final_positions(), Some((Position(289), Position(221))));
    assert_eq!(run.records, ds.rows);
}

#[test]
fn dataset_step_means() {
    assert_eq!(
        average_step_length(&load_dataset(DatasetId::Table5).steps()).unwrap(),
        21.5
    );
    let t3 = load_dataset(DatasetId::Table3).steps();
    assert_eq!(average_step_length(&t3).unwrap(), 667.0 / 31.0);
}

#[test]
fn replayed_tallies_keep_identities() {
    for id in DatasetId::ALL {
        let ds = load_dataset(id);
        let (tally, _) = replay_independent(&ds.rows, &ds.layout);
        assert!(tally.identities_hold(), "{id}");
        assert_eq!(tally.trials as usize, ds.rows.len());
    }
}
