//! Property tests for the structural invariants.

use fliplab_core::blocks::{find_critical_block, is_critical, surplus};
use fliplab_core::dynamics::{gain, hamiltonian, SpinConfig};
use fliplab_core::movealg::{
    build_move_matrix, exact_rank, revisits_state, seq_stats, MoveSeq,
};
use fliplab_core::weights::{pair_count, EdgeWeights};
use proptest::prelude::*;
use std::collections::HashSet;

fn arb_weights(n: usize) -> impl Strategy<Value = EdgeWeights> {
    prop::collection::vec(-1.0f64..=1.0, pair_count(n))
        .prop_map(move |x| EdgeWeights::new(n, x))
}

fn arb_spins(n: usize) -> impl Strategy<Value = SpinConfig> {
    prop::collection::vec(prop::bool::ANY, n)
        .prop_map(|bits| SpinConfig::new(bits.into_iter().map(|b| if b { 1 } else { -1 }).collect()))
}

fn arb_word(max_len: usize, alphabet: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..alphabet, 1..=max_len)
}

proptest! {
    #[test]
    fn gain_is_the_hamiltonian_increment(
        w in arb_weights(7),
        s in arb_spins(7),
        v in 0usize..7,
    ) {
        let g = gain(&w, &s, v).unwrap();
        let direct = hamiltonian(&w, &s.flipped(v)).unwrap() - hamiltonian(&w, &s).unwrap();
        prop_assert!((g - direct).abs() <= 1e-12);
    }

    #[test]
    fn global_flip_leaves_h_unchanged(w in arb_weights(6), s in arb_spins(6)) {
        let h = hamiltonian(&w, &s).unwrap();
        let h_neg = hamiltonian(&w, &s.negated()).unwrap();
        prop_assert!((h - h_neg).abs() <= 1e-12);
    }

    #[test]
    fn stats_partition_the_sequence(word in arb_word(24, 6)) {
        let stats = seq_stats(&word);
        prop_assert_eq!(stats.s, stats.s1 + stats.s2);
        // Blocks alternate and exactly cover [0, ell).
        let mut blocks: Vec<(usize, usize, bool)> = stats
            .singleton_blocks.iter().map(|&(i, j)| (i, j, false))
            .chain(stats.transition_blocks.iter().map(|&(i, j)| (i, j, true)))
            .collect();
        blocks.sort();
        let mut expect_start = 0;
        let mut prev_kind: Option<bool> = None;
        for &(i, j, kind) in &blocks {
            prop_assert_eq!(i, expect_start);
            prop_assert!(j >= i);
            if let Some(pk) = prev_kind {
                prop_assert_ne!(pk, kind);
            }
            prev_kind = Some(kind);
            expect_start = j + 1;
        }
        prop_assert_eq!(expect_start, word.len());
        // b(v) >= 1 for every repeated vertex, and the transition letter
        // sum identity.
        let total: usize = stats.transition_blocks.iter()
            .map(|&(i, j)| word[i..=j].iter().collect::<HashSet<_>>().len())
            .sum();
        prop_assert_eq!(total, stats.b.values().sum::<usize>());
        prop_assert!(stats.b.values().all(|&b| b >= 1));
    }

    #[test]
    fn revisit_flag_matches_state_simulation(word in arb_word(16, 5)) {
        let seq = MoveSeq::from_letters(&word).unwrap();
        let mut seen = HashSet::new();
        let mut revisited = false;
        for st in seq.states() {
            if !seen.insert(st) {
                revisited = true;
            }
        }
        prop_assert_eq!(revisits_state(&word), revisited);
    }

    #[test]
    fn matrix_columns_live_on_the_moved_vertex(word in arb_word(10, 5)) {
        let seq = MoveSeq::from_letters(&word).unwrap();
        let m = build_move_matrix(&seq);
        let states = seq.states();
        for (t, &v) in seq.moves.iter().enumerate() {
            for a in 0..seq.n {
                for b in a + 1..seq.n {
                    let e = m.entry(a, b, t);
                    if a != v as usize && b != v as usize {
                        prop_assert_eq!(e, 0);
                    } else {
                        let other = if a == v as usize { b } else { a };
                        prop_assert_eq!(e, states[t + 1].get(other));
                        prop_assert_eq!(e, states[t].get(other));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_is_independent_of_sigma0(word in arb_word(10, 4), seed in 0u64..1000) {
        let base = MoveSeq::from_letters(&word).unwrap();
        let rank0 = exact_rank(&build_move_matrix(&base));
        let redrawn = MoveSeq::new(
            base.n,
            SpinConfig::sample(base.n, seed, 0),
            base.moves.clone(),
        ).unwrap();
        prop_assert_eq!(exact_rank(&build_move_matrix(&redrawn)), rank0);
    }

    #[test]
    fn critical_blocks_found_are_critical_with_the_length_law(
        word in arb_word(20, 5),
        beta_idx in 0usize..3,
    ) {
        let beta = [0.5, 1.0, 2.0][beta_idx];
        if let Some((i, j)) = find_critical_block(&word, beta) {
            let block = &word[i..=j];
            prop_assert!(is_critical(block, beta));
            let s = block.iter().collect::<HashSet<_>>().len();
            let expected = ((1.0 + beta) * s as f64).ceil() as usize;
            prop_assert_eq!(block.len(), expected);
        }
    }

    #[test]
    fn concatenation_surplus_bound(word in arb_word(30, 6), cut_at in 1usize..29) {
        prop_assume!(cut_at < word.len());
        let s2 = seq_stats(&word).s2;
        prop_assert!(
            surplus(&word) <= surplus(&word[..cut_at]) + surplus(&word[cut_at..]) + s2
        );
    }
}
