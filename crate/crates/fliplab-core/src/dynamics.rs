//! The Hamiltonian and cut objectives, single-flip gains, the FLIP engine
//! with pluggable pivot rules, and exhaustive searches over improving move
//! sequences at small `n`.
//!
//! Simulation runs in f64 with an incrementally maintained per-vertex field
//! `field(v) = sum_u X_uv * sigma(u)`, so one flip costs O(n). Exhaustive
//! searches quantize the weights to integer multiples of 2^-40 and work in
//! exact integer arithmetic, so "improving" and "eps-slow" are unambiguous.

use crate::movealg::MoveSeq;
use crate::rng::{keyed_rng, DOMAIN_SPIN_INIT};
use crate::weights::{pair_index, EdgeWeights};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;
/// Largest `n` accepted by the exhaustive searches (2^n states).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 10;
/// Weights are rounded to integer multiples of 2^-DYADIC_BITS for exact
/// search arithmetic.
pub const DYADIC_BITS: u32 = 40;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("spin configuration has {spins} entries, weights have n = {n}")]
    SizeMismatch { spins: usize, n: usize },
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("n = {n} exceeds the exhaustive search cap {cap}")]
    ExhaustiveCap { n: usize, cap: usize },
    #[error("eps must be positive, got {0}")]
    InvalidEps(f64),
}

/// A +-1 assignment on the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Self {
        assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinConfig(spins)
    }

    pub fn all_plus(n: usize) -> Self {
        SpinConfig(vec![1; n])
    }

    /// Reproducible random configuration keyed by `(master_seed, trial)`.
    pub fn sample(n: usize, master_seed: u64, trial: u64) -> Self {
        let mut rng = keyed_rng(DOMAIN_SPIN_INIT, master_seed, trial, 0);
        SpinConfig((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    pub fn from_bitmask(n: usize, mask: u64) -> Self {
        SpinConfig((0..n).map(|v| if mask >> v & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn to_bitmask(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |m, (v, &s)| if s == 1 { m | 1 << v } else { m })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> i8 {
        self.0[v]
    }

    pub fn flip(&mut self, v: usize) {
        self.0[v] = -self.0[v];
    }

    pub fn flipped(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.flip(v);
        s
    }

    pub fn negated(&self) -> Self {
        SpinConfig(self.0.iter().map(|&s| -s).collect())
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }
}

fn check_sizes(w: &EdgeWeights, s: &SpinConfig) -> Result<(), DynamicsError> {
    if w.n() != s.len() {
        return Err(DynamicsError::SizeMismatch { spins: s.len(), n: w.n() });
    }
    Ok(())
}

/// `H(sigma) = -1/2 sum_{u<v} X_uv sigma(u) sigma(v)`.
pub fn hamiltonian(w: &EdgeWeights, s: &SpinConfig) -> Result<f64, DynamicsError> {
    check_sizes(w, s)?;
    let n = w.n();
    let mut acc = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            acc += w.get(u, v) * (s.get(u) * s.get(v)) as f64;
        }
    }
    Ok(-0.5 * acc)
}

/// `1/2 sum_{u<v} X_uv (1 - sigma(u) sigma(v))`; differs from the
/// Hamiltonian by half the total weight.
pub fn cut_value(w: &EdgeWeights, s: &SpinConfig) -> Result<f64, DynamicsError> {
    check_sizes(w, s)?;
    let n = w.n();
    let mut acc = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            acc += w.get(u, v) * (1.0 - (s.get(u) * s.get(v)) as f64);
        }
    }
    Ok(0.5 * acc)
}

/// Increment of `H` from flipping `v`: `sigma(v) * sum_u X_uv sigma(u)`.
pub fn gain(w: &EdgeWeights, s: &SpinConfig, v: usize) -> Result<f64, DynamicsError> {
    check_sizes(w, s)?;
    if v >= w.n() {
        return Err(DynamicsError::VertexOutOfRange { v, n: w.n() });
    }
    let mut field = 0.0;
    for u in 0..w.n() {
        if u != v {
            field += w.get(u, v) * s.get(u) as f64;
        }
    }
    Ok(s.get(v) as f64 * field)
}

/// Vertices with strictly positive gain, in ascending vertex order.
pub fn improving_moves(w: &EdgeWeights, s: &SpinConfig) -> Vec<(u32, f64)> {
    (0..w.n())
        .filter_map(|v| {
            let g = gain(w, s, v).expect("sizes checked by caller");
            (g > 0.0).then_some((v as u32, g))
        })
        .collect()
}

pub fn is_local_max(w: &EdgeWeights, s: &SpinConfig) -> bool {
    (0..w.n()).all(|v| gain(w, s, v).expect("sizes checked by caller") <= 0.0)
}

/// How the FLIP engine picks among improving moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PivotRule {
    /// Lowest improving vertex id.
    First,
    /// Maximum gain; ties go to the lowest id.
    Best,
    /// Uniform among improving vertices, from a seeded stream.
    Random { seed: u64 },
    /// Smallest positive gain; ties go to the lowest id. A deterministic
    /// adversary proxy for slow sequences.
    MinGain,
}

impl PivotRule {
    pub fn name(&self) -> &'static str {
        match self {
            PivotRule::First => "first",
            PivotRule::Best => "best",
            PivotRule::Random { .. } => "random",
            PivotRule::MinGain => "min-gain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    LocalMax,
    StepCap,
}

/// Record of one FLIP run: every move, its gain, and `H` after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipTrace {
    pub sigma0: SpinConfig,
    pub moves: Vec<u32>,
    pub gains: Vec<f64>,
    pub h_values: Vec<f64>,
    pub terminated: Termination,
}

impl FlipTrace {
    pub fn steps(&self) -> u64 {
        self.moves.len() as u64
    }

    pub fn final_h(&self, h0: f64) -> f64 {
        self.h_values.last().copied().unwrap_or(h0)
    }

    pub fn final_state(&self) -> SpinConfig {
        let mut s = self.sigma0.clone();
        for &v in &self.moves {
            s.flip(v as usize);
        }
        s
    }

    pub fn export(
        &self,
        n: usize,
        seed: u64,
        model: &str,
        rule: &str,
        final_h: f64,
        verbose: bool,
    ) -> TraceExport {
        TraceExport {
            n,
            seed,
            model: model.to_string(),
            rule: rule.to_string(),
            steps: self.steps(),
            final_h,
            gains: verbose.then(|| self.gains.clone()),
            moves: verbose.then(|| self.moves.clone()),
        }
    }
}

/// JSON view of a trace; `gains`/`moves` appear only under a verbose flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceExport {
    pub n: usize,
    pub seed: u64,
    pub model: String,
    pub rule: String,
    pub steps: u64,
    pub final_h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moves: Option<Vec<u32>>,
}

struct FlipEngine<'a> {
    w: &'a EdgeWeights,
    spins: SpinConfig,
    /// field[v] = sum_{u != v} X_uv * sigma(u)
    field: Vec<f64>,
    h: f64,
    steps_since_refresh: usize,
    refresh_interval: usize,
}

impl<'a> FlipEngine<'a> {
    fn new(w: &'a EdgeWeights, s0: SpinConfig) -> Self {
        let n = w.n();
        let mut engine = FlipEngine {
            w,
            spins: s0,
            field: vec![0.0; n],
            h: 0.0,
            steps_since_refresh: 0,
            // Refreshing every ~n steps keeps the field's accumulated
            // rounding error on the same order as one fresh recompute.
            refresh_interval: n.max(64),
        };
        engine.refresh_field();
        engine.h = hamiltonian(w, &engine.spins).expect("sizes checked");
        engine
    }

    fn refresh_field(&mut self) {
        let n = self.w.n();
        for v in 0..n {
            let mut acc = 0.0;
            for u in 0..n {
                if u != v {
                    acc += self.w.get(u, v) * self.spins.get(u) as f64;
                }
            }
            self.field[v] = acc;
        }
        self.steps_since_refresh = 0;
    }

    fn gain_of(&self, v: usize) -> f64 {
        self.spins.get(v) as f64 * self.field[v]
    }

    fn pick(&mut self, rule: &PivotRule, rng: &mut Option<rand_chacha::ChaCha8Rng>) -> Option<(usize, f64)> {
        let n = self.w.n();
        match rule {
            PivotRule::First => (0..n).find_map(|v| {
                let g = self.gain_of(v);
                (g > 0.0).then_some((v, g))
            }),
            PivotRule::Best => {
                let mut best: Option<(usize, f64)> = None;
                for v in 0..n {
                    let g = self.gain_of(v);
                    if g > 0.0 && best.map_or(true, |(_, bg)| g > bg) {
                        best = Some((v, g));
                    }
                }
                best
            }
            PivotRule::MinGain => {
                let mut best: Option<(usize, f64)> = None;
                for v in 0..n {
                    let g = self.gain_of(v);
                    if g > 0.0 && best.map_or(true, |(_, bg)| g < bg) {
                        best = Some((v, g));
                    }
                }
                best
            }
            PivotRule::Random { .. } => {
                let improving: Vec<(usize, f64)> = (0..n)
                    .filter_map(|v| {
                        let g = self.gain_of(v);
                        (g > 0.0).then_some((v, g))
                    })
                    .collect();
                if improving.is_empty() {
                    None
                } else {
                    let rng = rng.as_mut().expect("random rule has a stream");
                    Some(improving[rng.random_range(0..improving.len())])
                }
            }
        }
    }

    fn apply(&mut self, v: usize, g: f64) {
        self.h += g;
        self.spins.flip(v);
        let sv = self.spins.get(v) as f64;
        let n = self.w.n();
        for u in 0..n {
            if u != v {
                self.field[u] += 2.0 * self.w.get(u, v) * sv;
            }
        }
        self.steps_since_refresh += 1;
        if self.steps_since_refresh >= self.refresh_interval {
            self.refresh_field();
        }
    }
}

/// Runs FLIP from `s0` under `rule` until a local maximum or `step_cap`.
pub fn flip_run(
    w: &EdgeWeights,
    s0: &SpinConfig,
    rule: PivotRule,
    step_cap: u64,
) -> Result<FlipTrace, DynamicsError> {
    flip_run_with_progress(w, s0, rule, step_cap, u64::MAX, |_, _| {})
}

/// Like [`flip_run`] but invokes `on_checkpoint(steps, h)` every
/// `checkpoint_every` steps, for progress reporting on long runs.
pub fn flip_run_with_progress(
    w: &EdgeWeights,
    s0: &SpinConfig,
    rule: PivotRule,
    step_cap: u64,
    checkpoint_every: u64,
    mut on_checkpoint: impl FnMut(u64, f64),
) -> Result<FlipTrace, DynamicsError> {
    check_sizes(w, s0)?;
    let mut rng = match rule {
        PivotRule::Random { seed } => Some(keyed_rng(crate::rng::DOMAIN_PIVOT, seed, 0, 0)),
        _ => None,
    };
    let mut engine = FlipEngine::new(w, s0.clone());
    let mut trace = FlipTrace {
        sigma0: s0.clone(),
        moves: Vec::new(),
        gains: Vec::new(),
        h_values: Vec::new(),
        terminated: Termination::LocalMax,
    };
    let mut steps = 0u64;
    loop {
        if steps >= step_cap {
            trace.terminated = Termination::StepCap;
            break;
        }
        match engine.pick(&rule, &mut rng) {
            None => {
                trace.terminated = Termination::LocalMax;
                break;
            }
            Some((v, g)) => {
                engine.apply(v, g);
                trace.moves.push(v as u32);
                trace.gains.push(g);
                trace.h_values.push(engine.h);
                steps += 1;
                if steps % checkpoint_every == 0 {
                    on_checkpoint(steps, engine.h);
                }
            }
        }
    }
    Ok(trace)
}

/// Maximal runs of at least `window` consecutive steps whose gains all lie
/// in `(0, eps]`. Ranges are 0-based inclusive step indices.
pub fn epsilon_slow_blocks(trace: &FlipTrace, eps: f64, window: usize) -> Vec<(usize, usize)> {
    assert!(eps > 0.0, "eps must be positive");
    assert!(window >= 1, "window must be at least 1");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (t, &g) in trace.gains.iter().enumerate() {
        if g > 0.0 && g <= eps {
            start.get_or_insert(t);
        } else if let Some(s) = start.take() {
            if t - s >= window {
                out.push((s, t - 1));
            }
        }
    }
    if let Some(s) = start {
        let end = trace.gains.len() - 1;
        if end + 1 - s >= window {
            out.push((s, end));
        }
    }
    out
}

/// Edge weights rounded to integer multiples of 2^-DYADIC_BITS. Gains are
/// exact integers at this scale, so move comparisons are tie-free.
#[derive(Debug, Clone)]
pub struct QuantizedWeights {
    n: usize,
    q: Vec<i64>,
}

impl QuantizedWeights {
    pub fn from_weights(w: &EdgeWeights) -> Self {
        let scale = (1u64 << DYADIC_BITS) as f64;
        QuantizedWeights {
            n: w.n(),
            q: w.values().iter().map(|&x| (x * scale).round() as i64).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Gain of flipping `v` from the bitmask state, scaled by 2^DYADIC_BITS.
    pub fn gain_scaled(&self, state: u64, v: usize) -> i64 {
        let sv: i64 = if state >> v & 1 == 1 { 1 } else { -1 };
        let mut acc = 0i64;
        for u in 0..self.n {
            if u != v {
                let su: i64 = if state >> u & 1 == 1 { 1 } else { -1 };
                acc += self.q[pair_index(self.n, u, v)] * su;
            }
        }
        sv * acc
    }

    /// Scaled threshold for "gain <= eps": `floor(eps * 2^DYADIC_BITS)`.
    pub fn threshold(eps: f64) -> i64 {
        (eps * (1u64 << DYADIC_BITS) as f64).floor() as i64
    }
}

fn cap_check(n: usize, cap: usize) -> Result<(), DynamicsError> {
    if n > cap || n >= 64 {
        return Err(DynamicsError::ExhaustiveCap { n, cap });
    }
    Ok(())
}

/// Longest-path memo over the improving-move graph. Improving moves
/// strictly increase `H`, so the graph is acyclic and the recursion is
/// well-founded.
fn longest_from(
    q: &QuantizedWeights,
    state: u64,
    memo: &mut [Option<(u32, Option<u8>)>],
) -> (u32, Option<u8>) {
    if let Some(hit) = memo[state as usize] {
        return hit;
    }
    let mut best: (u32, Option<u8>) = (0, None);
    for v in 0..q.n() {
        if q.gain_scaled(state, v) > 0 {
            let (len, _) = longest_from(q, state ^ (1 << v), memo);
            if len + 1 > best.0 {
                best = (len + 1, Some(v as u8));
            }
        }
    }
    memo[state as usize] = Some(best);
    best
}

fn chain_witness(
    q: &QuantizedWeights,
    start: u64,
    len: usize,
    memo: &mut [Option<(u32, Option<u8>)>],
    slow: Option<i64>,
) -> MoveSeq {
    let mut moves = Vec::with_capacity(len);
    let mut state = start;
    for _ in 0..len {
        let v = match slow {
            None => longest_from(q, state, memo).1,
            Some(t) => slow_from(q, state, t, memo).1,
        }
        .expect("positive remaining length implies a next move");
        moves.push(v as u32);
        state ^= 1 << v;
    }
    MoveSeq::new(q.n(), SpinConfig::from_bitmask(q.n(), start), moves).expect("nonempty witness")
}

/// Exact maximum length of an improving sequence, by memoized search over
/// all 2^n states (or from `start` alone), with one witness.
pub fn longest_improving_path(
    w: &EdgeWeights,
    start: Option<&SpinConfig>,
    cap: usize,
) -> Result<(usize, Option<MoveSeq>), DynamicsError> {
    let n = w.n();
    cap_check(n, cap)?;
    if let Some(s) = start {
        check_sizes(w, s)?;
    }
    let q = QuantizedWeights::from_weights(w);
    let mut memo = vec![None; 1usize << n];
    let (best_len, best_start) = match start {
        Some(s) => (longest_from(&q, s.to_bitmask(), &mut memo).0, s.to_bitmask()),
        None => {
            let mut best = (0u32, 0u64);
            for state in 0..(1u64 << n) {
                let (len, _) = longest_from(&q, state, &mut memo);
                if len > best.0 {
                    best = (len, state);
                }
            }
            best
        }
    };
    if best_len == 0 {
        return Ok((0, None));
    }
    let witness = chain_witness(&q, best_start, best_len as usize, &mut memo, None);
    Ok((best_len as usize, Some(witness)))
}

/// Longest eps-slow path memo: moves restricted to scaled gains in
/// `[1, threshold]`.
fn slow_from(
    q: &QuantizedWeights,
    state: u64,
    threshold: i64,
    memo: &mut [Option<(u32, Option<u8>)>],
) -> (u32, Option<u8>) {
    if let Some(hit) = memo[state as usize] {
        return hit;
    }
    let mut best: (u32, Option<u8>) = (0, None);
    for v in 0..q.n() {
        let g = q.gain_scaled(state, v);
        if g > 0 && g <= threshold {
            let (len, _) = slow_from(q, state ^ (1 << v), threshold, memo);
            if len + 1 > best.0 {
                best = (len + 1, Some(v as u8));
            }
        }
    }
    memo[state as usize] = Some(best);
    best
}

/// Searches every initial state for a sequence of `target_len` moves whose
/// gains all lie in `(0, eps]`. Returns a witness, or `None` as an
/// exhaustive certificate that no such sequence exists.
pub fn hunt_slow_sequences(
    w: &EdgeWeights,
    eps: f64,
    target_len: usize,
    cap: usize,
) -> Result<Option<MoveSeq>, DynamicsError> {
    let n = w.n();
    cap_check(n, cap)?;
    if !(eps > 0.0) {
        return Err(DynamicsError::InvalidEps(eps));
    }
    if target_len == 0 {
        return Ok(None);
    }
    let q = QuantizedWeights::from_weights(w);
    let threshold = QuantizedWeights::threshold(eps);
    let mut memo = vec![None; 1usize << n];
    for state in 0..(1u64 << n) {
        let (len, _) = slow_from(&q, state, threshold, &mut memo);
        if len as usize >= target_len {
            let witness = chain_witness(&q, state, target_len, &mut memo, Some(threshold));
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Replays a move sequence move by move with quantized gains; returns the
/// scaled gain of every step, or the index of the first non-improving step.
pub fn replay_improving(w: &EdgeWeights, seq: &MoveSeq) -> Result<Vec<i64>, usize> {
    let q = QuantizedWeights::from_weights(w);
    let mut state = seq.sigma0.to_bitmask();
    let mut gains = Vec::with_capacity(seq.moves.len());
    for (t, &v) in seq.moves.iter().enumerate() {
        let g = q.gain_scaled(state, v as usize);
        if g <= 0 {
            return Err(t);
        }
        gains.push(g);
        state ^= 1 << v;
    }
    Ok(gains)
}
