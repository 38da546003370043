//! Agreement between the memoized slow-sequence hunter and a plain
//! recursive enumeration, coded here independently of the search in the
//! library.

use fliplab_core::dynamics::{
    hunt_slow_sequences, replay_improving, QuantizedWeights,
};
use fliplab_core::weights::{sample_weights, WeightModel};

/// Depth-first existence check for an eps-slow path of the target length,
/// with no memoization.
fn slow_path_exists(q: &QuantizedWeights, state: u64, threshold: i64, remaining: usize) -> bool {
    if remaining == 0 {
        return true;
    }
    for v in 0..q.n() {
        let g = q.gain_scaled(state, v);
        if g > 0 && g <= threshold && slow_path_exists(q, state ^ (1 << v), threshold, remaining - 1)
        {
            return true;
        }
    }
    false
}

#[test]
fn hunt_agrees_with_plain_enumeration() {
    let n = 5;
    let target = 2 * n;
    let model = WeightModel::uniform_window(0.5, 0x510).unwrap();
    for trial in 0..25u64 {
        let w = sample_weights(&model, n, trial).unwrap();
        let q = QuantizedWeights::from_weights(&w);
        for eps in [1e-1, 1e-2, 1e-3] {
            let threshold = QuantizedWeights::threshold(eps);
            let oracle = (0u64..1 << n).any(|s| slow_path_exists(&q, s, threshold, target));
            let hunted = hunt_slow_sequences(&w, eps, target, 10).unwrap();
            assert_eq!(hunted.is_some(), oracle, "trial {trial} eps {eps}");
            if let Some(seq) = hunted {
                assert_eq!(seq.moves.len(), target);
                let gains = replay_improving(&w, &seq).expect("witness replays");
                assert!(gains.iter().all(|&g| g > 0 && g <= threshold));
            }
        }
    }
}

#[test]
fn witness_fraction_is_monotone_in_eps() {
    // Larger eps can only admit more witnesses.
    let n = 5;
    let target = 2 * n;
    let model = WeightModel::uniform_window(0.5, 0xBEE).unwrap();
    let eps_grid = [2.0, 0.5, 0.1, 0.02, 0.004];
    let mut counts = vec![0u32; eps_grid.len()];
    for trial in 0..40u64 {
        let w = sample_weights(&model, n, trial).unwrap();
        let mut prev_found = true;
        for (k, &eps) in eps_grid.iter().enumerate() {
            let found = hunt_slow_sequences(&w, eps, target, 10).unwrap().is_some();
            if found {
                counts[k] += 1;
                assert!(prev_found, "witness at eps {eps} but none at a larger eps");
            }
            prev_found = found;
        }
    }
    for k in 1..counts.len() {
        assert!(counts[k] <= counts[k - 1], "{counts:?}");
    }
}
