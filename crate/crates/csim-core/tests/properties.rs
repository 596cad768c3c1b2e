//! Property tests for the solver state and the symmetry group.

use std::collections::HashSet;

use proptest::prelude::*;

use rand::SeedableRng;

use csim_core::canonical::{apply_action, Action};
use csim_core::format::{parse_partial, render_state};
use csim_core::model::{make_matrix, Coord, Grid, MatrixState, SignedValue};
use csim_core::verify::is_csim;

/// A small random type together with a batch of operations to replay.
#[derive(Clone, Debug)]
struct Script {
    rows: usize,
    cols: usize,
    colors: usize,
    ops: Vec<Op>,
}

#[derive(Clone, Debug)]
enum Op {
    Assign { row: usize, col: usize, value: i64 },
    Eliminate { row: usize, col: usize, value: i64 },
    Propagate,
}

fn scripts() -> impl Strategy<Value = Script> {
    (1usize..=3, 1usize..=3, 1usize..=4).prop_flat_map(|(rows, cols, colors)| {
        let op = (0usize..3, 1..=rows, 1..=cols, 1..=colors as i64, any::<bool>()).prop_map(
            move |(kind, row, col, color, negative)| {
                let value = if negative { -color } else { color };
                match kind {
                    0 => Op::Assign { row, col, value },
                    1 => Op::Eliminate { row, col, value },
                    _ => Op::Propagate,
                }
            },
        );
        prop::collection::vec(op, 0..12)
            .prop_map(move |ops| Script { rows, cols, colors, ops })
    })
}

fn replay(script: &Script) -> MatrixState {
    let mut state = make_matrix(script.rows, script.cols, script.colors).unwrap();
    let mut dead = false;
    for op in &script.ops {
        if dead {
            break;
        }
        match *op {
            Op::Assign { row, col, value } => {
                state.assign(Coord::new(row, col), SignedValue::from_int(value).unwrap());
            }
            Op::Eliminate { row, col, value } => {
                state.eliminate(Coord::new(row, col), SignedValue::from_int(value).unwrap());
            }
            Op::Propagate => dead = !state.propagate(),
        }
    }
    state
}

proptest! {
    /// Candidate sets only ever shrink, and never to empty.
    #[test]
    fn candidates_shrink_monotonically(script in scripts()) {
        let mut state = make_matrix(script.rows, script.cols, script.colors).unwrap();
        for op in &script.ops {
            let before = state.snapshot();
            let alive = match *op {
                Op::Assign { row, col, value } => {
                    state.assign(Coord::new(row, col), SignedValue::from_int(value).unwrap())
                }
                Op::Eliminate { row, col, value } => {
                    state.eliminate(Coord::new(row, col), SignedValue::from_int(value).unwrap())
                }
                Op::Propagate => state.propagate(),
            };
            for at in state.shape().coords() {
                let old = before.candidates(at);
                let new = state.candidates(at);
                prop_assert!(!new.is_empty(), "cell {at} emptied");
                for v in new.iter() {
                    prop_assert!(old.contains(v), "cell {at} grew");
                }
            }
            if !alive {
                break;
            }
        }
    }

    /// Neither queue ever holds a duplicate pair.
    #[test]
    fn queues_never_hold_duplicates(script in scripts()) {
        let state = replay(&script);
        let values: Vec<_> = state.pending_values().cloned().collect();
        let value_set: HashSet<_> = values.iter().cloned().collect();
        prop_assert_eq!(values.len(), value_set.len());
        let colors: Vec<_> = state.pending_colors().cloned().collect();
        let color_set: HashSet<_> = colors.iter().cloned().collect();
        prop_assert_eq!(colors.len(), color_set.len());
    }

    /// The text format round-trips: parsing a rendering renders identically.
    #[test]
    fn text_format_round_trips(script in scripts()) {
        let state = replay(&script);
        let rendered = render_state(&state);
        let reparsed = parse_partial(&rendered, state.shape()).unwrap();
        prop_assert_eq!(render_state(&reparsed), rendered);
    }

    /// Snapshots are observably independent of their originals.
    #[test]
    fn snapshots_are_independent(script in scripts()) {
        let state = replay(&script);
        let frozen = state.snapshot();
        let mut copy = state.snapshot();
        copy.propagate();
        for at in state.shape().coords() {
            prop_assert_eq!(state.candidates(at), frozen.candidates(at));
        }
    }
}

/// Known CSIMs to drive the group action on.
fn base_grids() -> Vec<(Grid, usize)> {
    let known_357 = Grid::from_ints(&[
        &[1, 2, 3, 4, 5],
        &[2, -1, 4, -3, 6],
        &[3, -4, -1, 2, 7],
    ])
    .unwrap();
    let known_444 = Grid::from_ints(&[
        &[1, 2, 3, 4],
        &[2, -1, 4, -3],
        &[3, -4, -1, 2],
        &[4, 3, -2, -1],
    ])
    .unwrap();
    vec![(known_357, 7), (known_444, 4)]
}

fn shuffled(size: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..=size).collect();
    for i in (1..perm.len()).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

proptest! {
    /// Ten-step compositions of the group generators preserve the CSIM
    /// property.
    #[test]
    fn group_action_closure(which in 0usize..2, steps_seed in any::<u64>()) {
        let (grid, n) = base_grids()[which].clone();
        let mut rng = rand::rngs::StdRng::seed_from_u64(steps_seed);
        let mut current = grid;
        for _ in 0..10 {
            let action = sample_action(&mut rng, current.rows(), current.cols(), n);
            current = apply_action(&current, &action, n).unwrap();
            prop_assert!(is_csim(&current, n));
        }
    }
}

fn sample_action(rng: &mut impl rand::Rng, rows: usize, cols: usize, n: usize) -> Action {
    match rng.random_range(0..6) {
        0 => Action::PermuteRows(shuffled(rows, rng)),
        1 => Action::PermuteColumns(shuffled(cols, rng)),
        2 => Action::PermuteColors(shuffled(n, rng)),
        3 => Action::FlipRows(random_subset(rng, rows)),
        4 => Action::FlipColumns(random_subset(rng, cols)),
        _ => Action::FlipColors(random_subset(rng, n)),
    }
}

fn random_subset(rng: &mut impl rand::Rng, size: usize) -> Vec<usize> {
    (1..=size).filter(|_| rng.random_bool(0.5)).collect()
}

#[test]
fn single_generators_preserve_known_csims() {
    for (grid, n) in base_grids() {
        let swapped_rows = {
            let mut perm: Vec<usize> = (1..=grid.rows()).collect();
            perm.swap(0, 1);
            apply_action(&grid, &Action::PermuteRows(perm), n).unwrap()
        };
        assert!(is_csim(&swapped_rows, n));

        let flipped = apply_action(&grid, &Action::FlipColors(vec![3]), n).unwrap();
        assert!(is_csim(&flipped, n));

        let recolor = {
            let mut perm: Vec<usize> = (1..=n).collect();
            perm.rotate_left(1);
            apply_action(&grid, &Action::PermuteColors(perm), n).unwrap()
        };
        assert!(is_csim(&recolor, n));
    }
}

