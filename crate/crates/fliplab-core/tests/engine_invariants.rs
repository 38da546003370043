//! Cross-cutting checks of the FLIP engine: monotonicity, incremental
//! drift, termination certificates, the improvement budget, state
//! freshness, and the equivalence of the cut and Hamiltonian objectives.

use fliplab_core::dynamics::{
    cut_value, flip_run, gain, hamiltonian, improving_moves, is_local_max, PivotRule, SpinConfig,
    Termination,
};
use fliplab_core::weights::{sample_weights, EdgeWeights, WeightModel};
use std::collections::HashSet;

fn instance(n: usize, trial: u64) -> EdgeWeights {
    let model = WeightModel::uniform_window(0.5, 0xF11F).unwrap();
    sample_weights(&model, n, trial).unwrap()
}

#[test]
fn traces_are_monotone_certified_and_drift_free() {
    let rules = [
        PivotRule::First,
        PivotRule::Best,
        PivotRule::Random { seed: 7 },
        PivotRule::MinGain,
    ];
    let n = 96;
    for trial in 0..12u64 {
        let w = instance(n, trial);
        let s0 = SpinConfig::sample(n, 0xAB, trial);
        let h0 = hamiltonian(&w, &s0).unwrap();
        for rule in rules {
            let trace = flip_run(&w, &s0, rule, 1 << 22).unwrap();
            assert_eq!(trace.terminated, Termination::LocalMax);
            let final_state = trace.final_state();
            assert!(is_local_max(&w, &final_state));
            let mut prev = h0;
            for (t, &h) in trace.h_values.iter().enumerate() {
                assert!(h > prev, "step {t} not improving");
                assert!((h - prev - trace.gains[t]).abs() <= 1e-12);
                prev = h;
            }
            // Incremental H vs recomputed H at the terminal state.
            let recomputed = hamiltonian(&w, &final_state).unwrap();
            let incremental = trace.final_h(h0);
            assert!(
                (recomputed - incremental).abs() <= 1e-9,
                "drift {}",
                (recomputed - incremental).abs()
            );
            // Total improvement budget from |X| <= 1.
            assert!(incremental - h0 <= (n * n) as f64 / 2.0);
        }
    }
}

#[test]
fn traces_never_revisit_a_state() {
    let n = 18;
    for trial in 0..40u64 {
        let w = instance(n, trial);
        let s0 = SpinConfig::sample(n, 0xCD, trial);
        let trace = flip_run(&w, &s0, PivotRule::Random { seed: trial }, 1 << 20).unwrap();
        let mut seen: HashSet<u64> = HashSet::new();
        let mut state = s0.clone();
        assert!(seen.insert(state.to_bitmask()));
        for &v in &trace.moves {
            state.flip(v as usize);
            assert!(seen.insert(state.to_bitmask()), "state revisited");
        }
    }
}

#[test]
fn cut_and_hamiltonian_agree_on_improvement() {
    // v improves the cut value iff it improves H; the increments are equal.
    let mut checked = 0;
    for trial in 0..125u64 {
        let n = 8;
        let w = instance(n, trial);
        let s = SpinConfig::sample(n, 0xEF, trial);
        for v in 0..n {
            let g = gain(&w, &s, v).unwrap();
            let flipped = s.flipped(v);
            let dcut = cut_value(&w, &flipped).unwrap() - cut_value(&w, &s).unwrap();
            let dh = hamiltonian(&w, &flipped).unwrap() - hamiltonian(&w, &s).unwrap();
            assert!((dcut - dh).abs() <= 1e-12);
            assert!((dcut - g).abs() <= 1e-12);
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn improving_moves_match_the_local_max_predicate() {
    for trial in 0..50u64 {
        let w = instance(12, trial);
        let s = SpinConfig::sample(12, 0x11, trial);
        let listed = improving_moves(&w, &s);
        assert_eq!(listed.is_empty(), is_local_max(&w, &s));
        for (v, g) in listed {
            assert!(g > 0.0);
            assert!((gain(&w, &s, v as usize).unwrap() - g).abs() == 0.0);
        }
    }
}
