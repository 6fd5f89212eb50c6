//! Randomized property tests for the game invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use diag_games::cantor::{self, QueryPlan};
use diag_games::core::{
    BinaryVector, CellState, GameParams, PartialMatrix, Query, Regime, Transcript,
};
use diag_games::engine::{self, Adversary, ScriptedScan, Winner};
use diag_games::kronecker::{self, BalancedAdversary, RandomAdversary, ZeroFirstAdversary};
use diag_games::matching;
use diag_games::oracle;

/// A random partial matrix: each cell independently unknown/0/1.
fn partial_matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = PartialMatrix> {
    (1..=max_m, 1..=max_n)
        .prop_flat_map(|(m, n)| {
            let cells = proptest::collection::vec(0u8..3, m * n);
            (Just((m, n)), cells)
        })
        .prop_map(|((m, n), cells)| {
            let mut l = PartialMatrix::new(GameParams::new(m, n).unwrap());
            for (idx, &c) in cells.iter().enumerate() {
                if c < 2 {
                    l.set_cell(Query::new(idx / n, idx % n), c).unwrap();
                }
            }
            l
        })
}

fn mid_params() -> impl Strategy<Value = GameParams> {
    (2usize..=6)
        .prop_flat_map(|n| (Just(n), (n + 1)..(1usize << n)))
        .prop_map(|(n, m)| GameParams::new(m, n).unwrap())
}

proptest! {
    // Replaying a transcript never hits an overwritten cell, and the JSON
    // round trip is exact.
    #[test]
    fn transcript_replay_and_json_round_trip(
        params in mid_params(),
        seed in any::<u64>(),
    ) {
        let mut s = cantor::AdaptiveStrategy::new(params).unwrap();
        let mut adv = RandomAdversary::new(seed);
        let mut t = engine::play_adaptive(&mut s, &mut adv, params).unwrap();
        t.seed = Some(seed);
        prop_assert!(t.replay().is_ok());
        let json = t.to_json();
        let back = Transcript::from_json(&json).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_json(), json);
    }

    // Adaptive strategy: exactly 2m - n queries and a judged win against
    // an arbitrary adversary.
    #[test]
    fn adaptive_query_count_and_win(
        params in mid_params(),
        seed in any::<u64>(),
    ) {
        let mut s = cantor::AdaptiveStrategy::new(params).unwrap();
        let mut adv = RandomAdversary::new(seed);
        let t = engine::play_adaptive(&mut s, &mut adv, params).unwrap();
        prop_assert_eq!(t.events.len(), 2 * params.m() - params.n());
        prop_assert_eq!(engine::judge_search(&t).unwrap(), Winner::Cantor);
    }

    // row_compatible is monotone non-increasing as cells get answered:
    // replaying the answered cells of `l` one at a time, compatibility
    // only ever switches from true to false.
    #[test]
    fn row_compatible_monotone(l in partial_matrix(5, 4)) {
        let n = l.params().n();
        let mut grown = PartialMatrix::new(l.params());
        let mut flags: Vec<Vec<bool>> =
            vec![vec![true; l.params().vector_count()]; l.params().m()];
        for (row, row_flags) in flags.iter_mut().enumerate() {
            for col in 0..n {
                let q = Query::new(row, col);
                let Some(b) = l.get(row, col).bit() else { continue };
                grown.set_cell(q, b).unwrap();
                for v in 0..l.params().vector_count() as u32 {
                    let now = grown.row_compatible(row, BinaryVector::new(v, n));
                    prop_assert!(row_flags[v as usize] || !now);
                    row_flags[v as usize] = now;
                }
            }
        }
    }

    // Every fixed row is compatible with the vector it spells.
    #[test]
    fn fixed_rows_are_compatible(l in partial_matrix(6, 4)) {
        for row in 0..l.params().m() {
            if let Some(v) = l.row_vector(row) {
                prop_assert!(l.row_compatible(row, v));
                prop_assert!(l.fixed_rows().contains(&v));
            }
        }
    }

    // Matching verdicts agree with exhaustive search, and returned
    // witnesses are valid.
    #[test]
    fn matching_agrees_with_enumeration(l in partial_matrix(10, 3)) {
        let fast = matching::is_unblocked(&l).unwrap();
        let slow = oracle::unblocked_by_enumeration(&l).unwrap();
        prop_assert_eq!(fast.is_some(), slow);
        if let Some(state) = fast {
            prop_assert!(state.is_valid_witness());
        }
    }

    // try_set_and_repair matches a fresh is_unblocked on the grown matrix.
    #[test]
    fn incremental_repair_is_sound(
        l in partial_matrix(9, 3),
        row in 0usize..9,
        col in 0usize..3,
        b in 0u8..2,
    ) {
        let row = row % l.params().m();
        let col = col % l.params().n();
        let q = Query::new(row, col);
        prop_assume!(matches!(l.get(row, col), CellState::Unknown));
        if let Some(state) = matching::is_unblocked(&l).unwrap() {
            let mut grown = l.clone();
            grown.set_cell(q, b).unwrap();
            let expected = matching::is_unblocked(&grown).unwrap().is_some();
            let repaired = state.try_set_and_repair(q, b).unwrap();
            prop_assert_eq!(repaired.is_some(), expected);
            if let Some(s) = repaired {
                prop_assert!(s.is_valid_witness());
            }
        }
    }

    // The balanced adversary keeps every column within one of balanced at
    // all times.
    #[test]
    fn balanced_adversary_stays_balanced(
        n in 1usize..6,
        queries in proptest::collection::vec((0usize..64, 0usize..6), 1..80),
    ) {
        let mut adv = BalancedAdversary::new(n);
        let mut counts = vec![(0i32, 0i32); n];
        let mut seen = BTreeSet::new();
        for (row, col) in queries {
            let col = col % n;
            if !seen.insert((row, col)) {
                continue;
            }
            let b = adv.answer(Query::new(row, col));
            if b == 0 {
                counts[col].0 += 1;
            } else {
                counts[col].1 += 1;
            }
            prop_assert!((counts[col].0 - counts[col].1).abs() <= 1);
        }
    }

    // zero-first: stays unblocked after every answer and ends complete.
    #[test]
    fn zero_first_preserves_unblockedness(
        n in 1usize..3,
        extra in 0usize..3,
        seed in any::<u64>(),
    ) {
        let m = (1 << n) + extra;
        let params = GameParams::new(m, n).unwrap();
        let mut adv = ZeroFirstAdversary::new(params).unwrap();
        let mut board = PartialMatrix::new(params);
        let mut s = ScriptedScan::shuffled(params, seed);
        let t = engine::play_adaptive(&mut s, &mut adv, params).unwrap();
        prop_assert_eq!(t.events.len(), m * n);
        for &(q, b) in &t.events {
            board.set_cell(q, b).unwrap();
            prop_assert!(matching::is_unblocked(&board).unwrap().is_some());
        }
        prop_assert!(board.is_complete());
        prop_assert_eq!(engine::judge_decision(&t).unwrap(), Winner::Cantor);
    }

    // When greedy covering succeeds its assignment is valid for the plan
    // and covers all of {0,1}^n.
    #[test]
    fn greedy_covering_is_verified(
        n in 1usize..5,
        rows in proptest::collection::vec(any::<u16>(), 1..12),
    ) {
        let per_row: Vec<BTreeSet<usize>> = rows
            .iter()
            .map(|&mask| (0..n).filter(|c| mask >> c & 1 == 1).collect())
            .collect();
        let plan = QueryPlan::new(n, per_row).unwrap();
        if let Some(a) = kronecker::greedy_covering(&plan).unwrap() {
            prop_assert!(a.matches_plan(&plan));
            prop_assert!(a.covers_all());
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // Parallel and sequential tables agree cell for cell. Few cases: each
    // one recomputes the exact game-value oracle for its tiny cells.
    #[test]
    fn table_matches_sequential(n in 2usize..5, span in 1usize..4) {
        let ranges = ((n, n), (n + 1, n + span));
        let par = engine::table(engine::Scenario::Adaptive, ranges.0, ranges.1).unwrap();
        let seq =
            engine::table_sequential(engine::Scenario::Adaptive, ranges.0, ranges.1).unwrap();
        prop_assert_eq!(par, seq);
    }
}

// Non-proptest regression checks that belong with the invariants.

#[test]
fn diagonal_defeats_every_answer_pattern() {
    // Exhaustive over all adversary bit strings at n = m = 3.
    let params = GameParams::new(3, 3).unwrap();
    for bits in 0u32..8 {
        struct Fixed(u32, usize);
        impl Adversary for Fixed {
            fn answer(&mut self, _q: Query) -> u8 {
                let b = (self.0 >> self.1 & 1) as u8;
                self.1 += 1;
                b
            }
        }
        let mut s = cantor::DiagonalStrategy::new(params).unwrap();
        let t = engine::play_adaptive(&mut s, &mut Fixed(bits, 0), params).unwrap();
        assert_eq!(engine::judge_search(&t).unwrap(), Winner::Cantor);
    }
}

#[test]
fn regimes_partition_the_parameter_space() {
    for n in 1..=4usize {
        for m in 1..=20usize {
            let p = GameParams::new(m, n).unwrap();
            let expected = if m <= n {
                Regime::Small
            } else if m < (1 << n) {
                Regime::Mid
            } else {
                Regime::Large
            };
            assert_eq!(p.regime(), expected);
        }
    }
}
