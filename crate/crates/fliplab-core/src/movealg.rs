//! Move vectors, the signed move matrix of a move sequence, exact integer
//! rank, sequence block statistics, and auditors for the rank lower bounds.
//!
//! Conventions. A move sequence `L = (v_1, ..., v_ell)` acts on spin states;
//! `sigma_t` is the state after step `t`. The move matrix has one row per
//! unordered vertex pair and one column per step; the entry at pair
//! `{u, v}` and step `t` is `sigma_t(u)` if `v_t = v` (and 0 when `v_t` is
//! not an endpoint). Its rank does not depend on `sigma_0`, only on the
//! move list.

use crate::dynamics::SpinConfig;
use crate::weights::{pair_count, pair_index, EdgeWeights};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MoveAlgError {
    #[error("move sequence must be nonempty")]
    EmptySequence,
    #[error("move {v} out of range for n = {n}")]
    MoveOutOfRange { v: u32, n: usize },
    #[error("sigma0 has {got} spins, expected {expected}")]
    SigmaSize { got: usize, expected: usize },
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("sequence revisits a state")]
    StateRevisit,
    #[error("bad sequence json: {0}")]
    Json(String),
}

/// An initial configuration plus an ordered list of flipped vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveSeq {
    pub n: usize,
    pub sigma0: SpinConfig,
    pub moves: Vec<u32>,
}

impl MoveSeq {
    pub fn new(n: usize, sigma0: SpinConfig, moves: Vec<u32>) -> Result<Self, MoveAlgError> {
        if moves.is_empty() {
            return Err(MoveAlgError::EmptySequence);
        }
        if sigma0.len() != n {
            return Err(MoveAlgError::SigmaSize { got: sigma0.len(), expected: n });
        }
        if let Some(&v) = moves.iter().find(|&&v| v as usize >= n) {
            return Err(MoveAlgError::MoveOutOfRange { v, n });
        }
        Ok(MoveSeq { n, sigma0, moves })
    }

    /// Canonical embedding of a bare letter sequence: vertices relabeled by
    /// first occurrence, `n = s + 1` so a non-moving vertex exists, all-plus
    /// start.
    pub fn from_letters(letters: &[u32]) -> Result<Self, MoveAlgError> {
        let mut relabel: BTreeMap<u32, u32> = BTreeMap::new();
        let mut moves = Vec::with_capacity(letters.len());
        for &x in letters {
            let next = relabel.len() as u32;
            let id = *relabel.entry(x).or_insert(next);
            moves.push(id);
        }
        let n = relabel.len() + 1;
        MoveSeq::new(n, SpinConfig::all_plus(n), moves)
    }

    pub fn ell(&self) -> usize {
        self.moves.len()
    }

    pub fn from_json(text: &str) -> Result<Self, MoveAlgError> {
        let raw: MoveSeq =
            serde_json::from_str(text).map_err(|e| MoveAlgError::Json(e.to_string()))?;
        MoveSeq::new(raw.n, raw.sigma0, raw.moves)
    }

    /// States `sigma_0, ..., sigma_ell` along the sequence.
    pub fn states(&self) -> Vec<SpinConfig> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        let mut s = self.sigma0.clone();
        out.push(s.clone());
        for &v in &self.moves {
            s.flip(v as usize);
            out.push(s.clone());
        }
        out
    }
}

/// The linear functional on edge weights giving the gain of flipping `v`
/// from `sigma`: value `sigma(v) sigma(u)` on each pair `{u, v}`, zero
/// elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    pub n: usize,
    pub v: usize,
    /// (other endpoint, entry) for each pair {other, v}, ascending.
    pub entries: Vec<(usize, i8)>,
}

impl AlphaVector {
    pub fn dot(&self, w: &EdgeWeights) -> f64 {
        self.entries
            .iter()
            .map(|&(u, a)| a as f64 * w.get(u, self.v))
            .sum()
    }

    /// Entry on the pair `{a, b}` (0 if `v` is not an endpoint).
    pub fn entry(&self, a: usize, b: usize) -> i8 {
        if a == self.v {
            self.entries.iter().find(|&&(u, _)| u == b).map_or(0, |&(_, e)| e)
        } else if b == self.v {
            self.entries.iter().find(|&&(u, _)| u == a).map_or(0, |&(_, e)| e)
        } else {
            0
        }
    }
}

pub fn alpha_vector(s: &SpinConfig, v: usize) -> Result<AlphaVector, MoveAlgError> {
    let n = s.len();
    if v >= n {
        return Err(MoveAlgError::VertexOutOfRange { v, n });
    }
    let sv = s.get(v);
    let entries = (0..n)
        .filter(|&u| u != v)
        .map(|u| (u, sv * s.get(u)))
        .collect();
    Ok(AlphaVector { n, v, entries })
}

/// Sparse column-major move matrix: rows are unordered pairs, columns are
/// steps, entries in {-1, 0, 1}. Column `t` is supported exactly on the
/// pairs incident to `v_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveMatrix {
    n: usize,
    cols: Vec<MoveColumn>,
}

#[derive(Debug, Clone, PartialEq)]
struct MoveColumn {
    v: usize,
    /// `sigma_t(u)` for `u != v`, ascending in `u`.
    others: Vec<i8>,
}

impl MoveMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.cols.len()
    }

    pub fn rows(&self) -> usize {
        pair_count(self.n)
    }

    pub fn moved_vertex(&self, t: usize) -> usize {
        self.cols[t].v
    }

    /// Entry at pair `{a, b}` and step `t` (0-based).
    pub fn entry(&self, a: usize, b: usize, t: usize) -> i8 {
        let col = &self.cols[t];
        let other = if col.v == a {
            b
        } else if col.v == b {
            a
        } else {
            return 0;
        };
        let idx = if other < col.v { other } else { other - 1 };
        col.others[idx]
    }

    /// Pair rows supporting column `t`, ascending by pair index.
    pub fn column_support(&self, t: usize) -> Vec<usize> {
        let v = self.cols[t].v;
        let mut rows: Vec<usize> = (0..self.n)
            .filter(|&u| u != v)
            .map(|u| pair_index(self.n, u, v))
            .collect();
        rows.sort_unstable();
        rows
    }

    /// Dense copy, rows = pairs in pair-index order, columns = steps.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut dense = vec![vec![0i64; self.ell()]; self.rows()];
        for (t, col) in self.cols.iter().enumerate() {
            let mut k = 0;
            for u in 0..self.n {
                if u != col.v {
                    dense[pair_index(self.n, u, col.v)][t] = col.others[k] as i64;
                    k += 1;
                }
            }
        }
        dense
    }
}

pub fn build_move_matrix(seq: &MoveSeq) -> MoveMatrix {
    let n = seq.n;
    let mut sigma = seq.sigma0.clone();
    let mut cols = Vec::with_capacity(seq.moves.len());
    for &v in &seq.moves {
        let v = v as usize;
        sigma.flip(v);
        let others = (0..n).filter(|&u| u != v).map(|u| sigma.get(u)).collect();
        cols.push(MoveColumn { v, others });
    }
    MoveMatrix { n, cols }
}

/// Fraction-free (Bareiss) elimination in i128; `None` signals overflow.
fn bareiss_rank_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    if rows == 0 {
        return Some(0);
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    let mut prev = 1i128;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot_row) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col];
        for r in rank + 1..rows {
            let factor = m[r][col];
            for c in col + 1..cols {
                let a = m[r][c].checked_mul(pivot)?;
                let b = m[rank][c].checked_mul(factor)?;
                let num = a.checked_sub(b)?;
                debug_assert_eq!(num % prev, 0);
                m[r][c] = num / prev;
            }
            m[r][col] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank_big(dense: &[Vec<i64>]) -> usize {
    let rows = dense.len();
    if rows == 0 {
        return 0;
    }
    let cols = dense[0].len();
    let mut m: Vec<Vec<BigInt>> = dense
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut rank = 0usize;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col].clone();
        for r in rank + 1..rows {
            let factor = m[r][col].clone();
            for c in col + 1..cols {
                let num = &m[r][c] * &pivot - &m[rank][c] * &factor;
                debug_assert!((&num % &prev).is_zero());
                m[r][c] = num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Exact rank over the rationals of an integer matrix.
pub fn exact_rank_dense(dense: &[Vec<i64>]) -> usize {
    let as_i128: Vec<Vec<i128>> = dense
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    match bareiss_rank_i128(as_i128) {
        Some(rank) => rank,
        None => bareiss_rank_big(dense),
    }
}

/// Exact rank of the move matrix. The matrix is transposed first (steps as
/// rows) since `ell` is typically far smaller than the pair count.
pub fn exact_rank(m: &MoveMatrix) -> usize {
    let dense = m.to_dense();
    let transposed: Vec<Vec<i64>> = (0..m.ell())
        .map(|t| dense.iter().map(|row| row[t]).collect())
        .collect();
    exact_rank_dense(&transposed)
}

/// Rank over GF(p); a fast randomized cross-check for [`exact_rank`]
/// (the modular rank can only undercount).
pub fn modular_rank(m: &MoveMatrix, p: u64) -> usize {
    assert!(p > 1 && p < (1 << 31));
    let dense = m.to_dense();
    let mut rows: Vec<Vec<u64>> = (0..m.ell())
        .map(|t| dense.iter().map(|row| row[t].rem_euclid(p as i64) as u64).collect())
        .collect();
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let inv = |a: u64| -> u64 {
        // Fermat inverse; p is prime.
        let mut base = a % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc
    };
    let mut rank = 0usize;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot_row) = (rank..nrows).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let piv_inv = inv(rows[rank][col]);
        for r in rank + 1..nrows {
            if rows[r][col] != 0 {
                let factor = rows[r][col] * piv_inv % p;
                for c in col..ncols {
                    let sub = factor * rows[rank][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Letter statistics of a sequence: singleton/repeated counts, the
/// alternating singleton/transition block decomposition, and for every
/// repeated vertex the number of transition blocks containing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockStats {
    pub ell: usize,
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    /// 0-based inclusive ranges.
    pub singleton_blocks: Vec<(usize, usize)>,
    pub transition_blocks: Vec<(usize, usize)>,
    pub b: BTreeMap<u32, usize>,
}

impl BlockStats {
    pub fn b_of(&self, v: u32) -> usize {
        self.b.get(&v).copied().unwrap_or(0)
    }

    /// `sum_v (b(v) - 1)^+` over repeated vertices.
    pub fn excess_b(&self) -> usize {
        self.b.values().map(|&b| b.saturating_sub(1)).sum()
    }
}

pub fn seq_stats(moves: &[u32]) -> BlockStats {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in moves {
        *counts.entry(v).or_insert(0) += 1;
    }
    let s = counts.len();
    let s1 = counts.values().filter(|&&c| c == 1).count();
    let s2 = s - s1;
    let is_repeated = |v: u32| counts[&v] >= 2;

    let mut singleton_blocks = Vec::new();
    let mut transition_blocks = Vec::new();
    let mut b: BTreeMap<u32, usize> = BTreeMap::new();
    let mut i = 0usize;
    while i < moves.len() {
        let repeated = is_repeated(moves[i]);
        let mut j = i;
        while j + 1 < moves.len() && is_repeated(moves[j + 1]) == repeated {
            j += 1;
        }
        if repeated {
            transition_blocks.push((i, j));
            let mut in_block: HashSet<u32> = HashSet::new();
            for &v in &moves[i..=j] {
                in_block.insert(v);
            }
            for v in in_block {
                *b.entry(v).or_insert(0) += 1;
            }
        } else {
            singleton_blocks.push((i, j));
        }
        i = j + 1;
    }
    BlockStats {
        ell: moves.len(),
        s,
        s1,
        s2,
        singleton_blocks,
        transition_blocks,
        b,
    }
}

/// True iff some block of the sequence contains every vertex an even number
/// of times — equivalently, iff the walk revisits a spin state.
pub fn revisits_state(moves: &[u32]) -> bool {
    let n = moves.iter().copied().max().map_or(0, |m| m as usize + 1);
    let words = n.div_ceil(64).max(1);
    let mut parity = vec![0u64; words];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(parity.clone());
    for &v in moves {
        parity[v as usize / 64] ^= 1 << (v as usize % 64);
        if !seen.insert(parity.clone()) {
            return true;
        }
    }
    false
}

/// Auxiliary digraph for the repeated-vertex rank bound: one out-edge per
/// repeated vertex `v` toward a vertex appearing an odd number of times
/// between `v`'s first two appearances, plus an acyclic subgraph obtained
/// by deleting one edge per directed cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxGraph {
    pub edges: Vec<(u32, u32)>,
    pub acyclic_edges: Vec<(u32, u32)>,
}

pub fn build_aux_graph(moves: &[u32]) -> Result<AuxGraph, MoveAlgError> {
    let stats = seq_stats(moves);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(stats.s2);
    for (&v, _) in stats.b.iter() {
        let mut occ = moves.iter().enumerate().filter(|&(_, &x)| x == v);
        let t1 = occ.next().expect("repeated vertex occurs").0;
        let t2 = occ.next().expect("repeated vertex occurs twice").0;
        let mut between: BTreeMap<u32, usize> = BTreeMap::new();
        for &x in &moves[t1 + 1..t2] {
            *between.entry(x).or_insert(0) += 1;
        }
        // Smallest vertex with odd count; none would certify a revisit.
        let u = between
            .iter()
            .find(|&(_, &c)| c % 2 == 1)
            .map(|(&u, _)| u)
            .ok_or(MoveAlgError::StateRevisit)?;
        edges.push((v, u));
    }

    // Out-degree <= 1, so directed cycles are vertex-disjoint. Walk each
    // component to its cycle, then drop the edge leaving the smallest
    // vertex of each cycle.
    let out: BTreeMap<u32, u32> = edges.iter().copied().collect();
    let mut color: BTreeMap<u32, u8> = BTreeMap::new(); // 1 in progress, 2 done
    let mut cycle_minima: Vec<u32> = Vec::new();
    for &start in out.keys() {
        if color.get(&start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            match color.get(&cur).copied().unwrap_or(0) {
                1 => {
                    // Found a new cycle: the tail of `path` from `cur`.
                    let pos = path.iter().position(|&x| x == cur).expect("on path");
                    let min = *path[pos..].iter().min().expect("nonempty cycle");
                    cycle_minima.push(min);
                    break;
                }
                2 => break,
                _ => {}
            }
            color.insert(cur, 1);
            path.push(cur);
            match out.get(&cur) {
                Some(&next) => cur = next,
                None => break,
            }
        }
        for v in path {
            color.insert(v, 2);
        }
    }
    cycle_minima.sort_unstable();
    let acyclic_edges = edges
        .iter()
        .copied()
        .filter(|&(v, _)| !cycle_minima.contains(&v))
        .collect();
    Ok(AuxGraph { edges, acyclic_edges })
}

/// Report of [`audit_rank_bounds`]: the exact rank against the three lower
/// bounds. Bounds (ii) and (iii) require `s < n` and no state revisit;
/// when the hypotheses fail they are reported as not applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankAuditReport {
    pub n: usize,
    pub ell: usize,
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    pub revisits: bool,
    pub rank: usize,
    pub bound_i: usize,
    /// Bound (ii) is `s + s2/2`, kept exact as `(2s + s2) / 2`.
    pub bound_ii_halves: usize,
    pub bound_iii: usize,
    pub pass_i: bool,
    pub pass_ii: Option<bool>,
    pub pass_iii: Option<bool>,
}

impl RankAuditReport {
    pub fn all_pass(&self) -> bool {
        self.pass_i && self.pass_ii.unwrap_or(true) && self.pass_iii.unwrap_or(true)
    }
}

pub fn audit_rank_bounds(seq: &MoveSeq) -> RankAuditReport {
    let stats = seq_stats(&seq.moves);
    let revisits = revisits_state(&seq.moves);
    let rank = exact_rank(&build_move_matrix(seq));
    let bound_i = stats.s.min(seq.n - 1);
    let bound_ii_halves = 2 * stats.s + stats.s2;
    let bound_iii = stats.s + stats.excess_b();
    let applicable = stats.s < seq.n && !revisits;
    RankAuditReport {
        n: seq.n,
        ell: stats.ell,
        s: stats.s,
        s1: stats.s1,
        s2: stats.s2,
        revisits,
        rank,
        bound_i,
        bound_ii_halves,
        bound_iii,
        pass_i: rank >= bound_i,
        pass_ii: applicable.then(|| 2 * rank >= bound_ii_halves),
        pass_iii: applicable.then(|| rank >= bound_iii),
    }
}

/// Smallest vertex id not appearing in the moves, if any.
pub fn reference_vertex(seq: &MoveSeq) -> Option<usize> {
    let used: HashSet<u32> = seq.moves.iter().copied().collect();
    (0..seq.n).find(|&v| !used.contains(&(v as u32)))
}

fn submatrix_rank(m: &MoveMatrix, row_pairs: &[(usize, usize)], cols: Option<&[usize]>) -> usize {
    let col_ids: Vec<usize> = match cols {
        Some(c) => c.to_vec(),
        None => (0..m.ell()).collect(),
    };
    let dense: Vec<Vec<i64>> = row_pairs
        .iter()
        .map(|&(a, b)| col_ids.iter().map(|&t| m.entry(a, b, t) as i64).collect())
        .collect();
    exact_rank_dense(&dense)
}

/// Rank of the singleton witness rows: pairs `{v, ref}` for each distinct
/// `v`, restricted to one column per distinct vertex. Full rank `s` backs
/// bound (i).
pub fn witness_rank_singleton(seq: &MoveSeq) -> Option<(usize, usize)> {
    let rf = reference_vertex(seq)?;
    let m = build_move_matrix(seq);
    let mut first_time: BTreeMap<u32, usize> = BTreeMap::new();
    for (t, &v) in seq.moves.iter().enumerate() {
        first_time.entry(v).or_insert(t);
    }
    let rows: Vec<(usize, usize)> = first_time.keys().map(|&v| (v as usize, rf)).collect();
    let cols: Vec<usize> = first_time.values().copied().collect();
    let expected = rows.len();
    Some((expected, submatrix_rank(&m, &rows, Some(&cols))))
}

/// Rank of the witness rows for bound (ii): all `{v, ref}` rows plus the
/// acyclic auxiliary-graph edges. Expected full rank `s + |H'|`.
pub fn witness_rank_aux(seq: &MoveSeq) -> Option<(usize, usize)> {
    let rf = reference_vertex(seq)?;
    let aux = build_aux_graph(&seq.moves).ok()?;
    let m = build_move_matrix(seq);
    let stats = seq_stats(&seq.moves);
    let mut rows: Vec<(usize, usize)> = stats.b.keys().map(|&v| (v as usize, rf)).collect();
    let singles: Vec<(usize, usize)> = seq
        .moves
        .iter()
        .copied()
        .collect::<HashSet<_>>()
        .into_iter()
        .filter(|v| !stats.b.contains_key(v))
        .map(|v| (v as usize, rf))
        .collect();
    rows.extend(singles);
    rows.extend(aux.acyclic_edges.iter().map(|&(a, b)| (a as usize, b as usize)));
    let expected = stats.s + aux.acyclic_edges.len();
    Some((expected, submatrix_rank(&m, &rows, None)))
}

/// Rank of the witness rows for bound (iii): all `{v, ref}` rows plus, for
/// each repeated vertex, one row per extra transition block pairing it with
/// an intervening singleton. Expected full rank `s + sum (b(v)-1)^+`.
pub fn witness_rank_transition(seq: &MoveSeq) -> Option<(usize, usize)> {
    let rf = reference_vertex(seq)?;
    if revisits_state(&seq.moves) {
        return None;
    }
    let stats = seq_stats(&seq.moves);
    let m = build_move_matrix(seq);
    let singleton_at: BTreeMap<usize, u32> = stats
        .singleton_blocks
        .iter()
        .flat_map(|&(i, j)| (i..=j).map(|p| (p, seq.moves[p])))
        .collect();
    let mut rows: Vec<(usize, usize)> = Vec::new();
    let distinct: HashSet<u32> = seq.moves.iter().copied().collect();
    let mut sorted: Vec<u32> = distinct.into_iter().collect();
    sorted.sort_unstable();
    for v in &sorted {
        rows.push((*v as usize, rf));
    }
    for (&v, &bv) in stats.b.iter() {
        if bv < 2 {
            continue;
        }
        // First occurrence of v inside each transition block containing it.
        let times: Vec<usize> = stats
            .transition_blocks
            .iter()
            .filter_map(|&(i, j)| (i..=j).find(|&p| seq.moves[p] == v))
            .collect();
        debug_assert_eq!(times.len(), bv);
        for pair in times.windows(2) {
            let (t_prev, t_next) = (pair[0], pair[1]);
            let (&_, &w) = singleton_at
                .range(t_prev + 1..t_next)
                .next()
                .expect("a singleton block separates transition blocks");
            rows.push((v as usize, w as usize));
        }
    }
    let expected = stats.s + stats.excess_b();
    Some((expected, submatrix_rank(&m, &rows, None)))
}

/// Random sequence over letters `0..alphabet` with a skewed letter law so
/// multiplicity profiles vary.
pub fn random_move_seq(
    n: usize,
    ell: usize,
    alphabet: usize,
    rng: &mut impl Rng,
) -> MoveSeq {
    assert!(alphabet >= 1 && alphabet <= n && ell >= 1);
    let hot = rng.random_range(0..alphabet);
    let moves = (0..ell)
        .map(|_| {
            if rng.random::<f64>() < 0.35 {
                hot as u32
            } else {
                rng.random_range(0..alphabet) as u32
            }
        })
        .collect();
    let sigma0 = SpinConfig::new((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect());
    MoveSeq::new(n, sigma0, moves).expect("validated parameters")
}

/// Rejection-samples a non-revisiting sequence; `None` if `max_tries`
/// random draws all revisit.
pub fn random_nonrevisiting_seq(
    n: usize,
    ell: usize,
    alphabet: usize,
    rng: &mut impl Rng,
    max_tries: usize,
) -> Option<MoveSeq> {
    for _ in 0..max_tries {
        let seq = random_move_seq(n, ell, alphabet, rng);
        if !revisits_state(&seq.moves) {
            return Some(seq);
        }
    }
    None
}
