//! Critical-block machinery: detection, exhaustive enumeration at small
//! alphabet sizes, rank checks for enumerated blocks, and the densest-block
//! scanner over arbitrary words.
//!
//! A block `B` is critical for surplus parameter `beta` when
//! `ell(B) >= (1+beta) s(B)` while every strictly contained block fails the
//! same inequality; a critical block necessarily has
//! `ell(B) = ceil((1+beta) s(B))`. Comparisons use the exact binary
//! rational value of `beta`, so the default `beta = 1` is tie-exact.

use crate::movealg::{exact_rank, build_move_matrix, revisits_state, seq_stats, MoveSeq};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_BETA: f64 = 1.0;
/// Enumeration guard: the search space grows like s^(2s).
pub const MAX_ENUMERATION_S: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum BlocksError {
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("alphabet size {s} exceeds the enumeration guard {max}")]
    AlphabetTooLarge { s: usize, max: usize },
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
}

/// `min_lens[s]` = smallest integer `ell` with `ell >= (1+beta) s`, i.e.
/// `ceil((1+beta) s)`, computed exactly from the binary value of `beta`.
fn critical_min_lens(beta: f64, max_s: usize) -> Result<Vec<usize>, BlocksError> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(BlocksError::InvalidBeta(beta));
    }
    let one_plus = BigRational::from_float(1.0 + beta).expect("finite beta");
    Ok((0..=max_s)
        .map(|s| {
            let x = &one_plus * BigInt::from(s);
            x.ceil().to_integer().to_usize().expect("small product")
        })
        .collect())
}

fn distinct_letters(block: &[u32]) -> usize {
    let mut seen: Vec<u32> = block.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// True iff the slice, taken as a whole block, is critical for `beta`.
/// O(len^2) over all strict sub-blocks with incremental distinct counts.
pub fn is_critical(block: &[u32], beta: f64) -> bool {
    let ell = block.len();
    if ell == 0 {
        return false;
    }
    let min_lens = critical_min_lens(beta, ell).expect("caller passes valid beta");
    let sat = |len: usize, s: usize| len >= min_lens[s];
    if !sat(ell, distinct_letters(block)) {
        return false;
    }
    let mut remap: BTreeMap<u32, usize> = BTreeMap::new();
    let dense: Vec<usize> = block
        .iter()
        .map(|&x| {
            let next = remap.len();
            *remap.entry(x).or_insert(next)
        })
        .collect();
    let mut counts = vec![0u32; remap.len()];
    for i in 0..ell {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut s = 0usize;
        for j in i..ell {
            let x = dense[j];
            if counts[x] == 0 {
                s += 1;
            }
            counts[x] += 1;
            if i == 0 && j == ell - 1 {
                continue; // the block itself, not a strict sub-block
            }
            if sat(j - i + 1, s) {
                return false;
            }
        }
    }
    true
}

/// Finds the shortest (then leftmost) block with `ell >= (1+beta) s`; by
/// minimality it is critical. Returns the 0-based inclusive range, or
/// `None` when no block satisfies the inequality.
pub fn find_critical_block(seq: &[u32], beta: f64) -> Option<(usize, usize)> {
    let ell = seq.len();
    if ell == 0 {
        return None;
    }
    let min_lens = critical_min_lens(beta, ell).expect("caller passes valid beta");
    let mut remap: BTreeMap<u32, usize> = BTreeMap::new();
    let dense: Vec<usize> = seq
        .iter()
        .map(|&x| {
            let next = remap.len();
            *remap.entry(x).or_insert(next)
        })
        .collect();
    let mut counts = vec![0u32; remap.len()];
    for len in 1..=ell {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut s = 0usize;
        for j in 0..ell {
            let x = dense[j];
            if counts[x] == 0 {
                s += 1;
            }
            counts[x] += 1;
            if j >= len {
                let y = dense[j - len];
                counts[y] -= 1;
                if counts[y] == 0 {
                    s -= 1;
                }
            }
            if j + 1 >= len && len >= min_lens[s] {
                return Some((j + 1 - len, j));
            }
        }
    }
    None
}

/// Canonical critical blocks on exactly `s` letters that do not revisit a
/// state. Canonical means letters are 0-based and first occurrences appear
/// in increasing order; criticality fixes the length to
/// `ceil((1+beta) s)`. Critical blocks that revisit a state are counted
/// but not returned; rank claims do not apply to them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalEnumeration {
    pub s: usize,
    pub target_len: usize,
    pub blocks: Vec<Vec<u32>>,
    pub revisiting_skipped: usize,
}

pub fn enumerate_critical_blocks(
    s: usize,
    beta: f64,
) -> Result<CriticalEnumeration, BlocksError> {
    if s == 0 {
        return Err(BlocksError::EmptyAlphabet);
    }
    if s > MAX_ENUMERATION_S {
        return Err(BlocksError::AlphabetTooLarge { s, max: MAX_ENUMERATION_S });
    }
    let min_lens = critical_min_lens(beta, 2 * s + s)?;
    let target = min_lens[s];
    let mut out = CriticalEnumeration {
        s,
        target_len: target,
        blocks: Vec::new(),
        revisiting_skipped: 0,
    };

    // Depth-first over restricted-growth words of length `target`.
    // `window_s[i]` tracks the distinct count of the window [i, k] for the
    // current prefix of length k+1; appending a letter increments it for
    // exactly the starts after the letter's previous occurrence.
    struct Dfs<'a> {
        s: usize,
        target: usize,
        min_lens: &'a [usize],
        word: Vec<u32>,
        window_s: Vec<usize>,
        last_pos: Vec<Option<usize>>,
        out: &'a mut CriticalEnumeration,
    }

    impl Dfs<'_> {
        fn place(&mut self, used: usize) {
            let k = self.word.len();
            let remaining = self.target - k;
            // Must still be able to introduce the missing letters.
            if self.s - used > remaining {
                return;
            }
            let max_letter = if used < self.s { used } else { used - 1 };
            for x in 0..=max_letter as u32 {
                let last = self.last_pos[x as usize];
                let bump_from = last.map_or(0, |p| p + 1);
                for i in bump_from..k {
                    self.window_s[i] += 1;
                }
                self.window_s.push(1);
                self.word.push(x);
                self.last_pos[x as usize] = Some(k);

                let final_pos = k + 1 == self.target;
                let mut ok = true;
                for i in (0..=k).rev() {
                    let sat = k - i + 1 >= self.min_lens[self.window_s[i]];
                    if i == 0 && final_pos {
                        // The whole word must satisfy the inequality.
                        if !sat {
                            ok = false;
                        }
                    } else if sat {
                        // A strict sub-block satisfying it kills criticality.
                        ok = false;
                        break;
                    }
                }
                if ok {
                    if final_pos {
                        if self.window_s[0] != self.s {
                            // fewer than s letters used
                        } else if revisits_state(&self.word) {
                            self.out.revisiting_skipped += 1;
                        } else {
                            self.out.blocks.push(self.word.clone());
                        }
                    } else {
                        self.place(used + usize::from(x as usize == used));
                    }
                }

                self.last_pos[x as usize] = last;
                self.word.pop();
                self.window_s.pop();
                for i in bump_from..k {
                    self.window_s[i] -= 1;
                }
            }
        }
    }

    let mut dfs = Dfs {
        s,
        target,
        min_lens: &min_lens,
        word: Vec::with_capacity(target),
        window_s: Vec::with_capacity(target),
        last_pos: vec![None; s],
        out: &mut out,
    };
    dfs.place(0);
    Ok(out)
}

/// Exact-rank report for a block taken as a move sequence on `s + 1`
/// vertices. The corollary bounds require a non-revisiting block; when the
/// block revisits a state they are reported as not applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRankReport {
    pub ell: usize,
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    pub critical: bool,
    pub revisits: bool,
    pub rank: usize,
    /// rank >= s + max(beta/(1+beta) s1, s2/2)
    pub pass_corollary: Option<bool>,
    /// rank >= (1+4 beta)/(1+3 beta) s
    pub pass_ratio: Option<bool>,
}

pub fn check_critical_rank(block: &[u32], beta: f64) -> Result<CriticalRankReport, BlocksError> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(BlocksError::InvalidBeta(beta));
    }
    let stats = seq_stats(block);
    let seq = MoveSeq::from_letters(block).expect("nonempty block");
    let rank = exact_rank(&build_move_matrix(&seq));
    let revisits = revisits_state(block);
    let critical = is_critical(block, beta);
    let applicable = !revisits;
    let (pass_corollary, pass_ratio) = if applicable {
        let b = BigRational::from_float(beta).expect("finite beta");
        let one = BigRational::from_integer(BigInt::from(1));
        let rank_r = BigRational::from_integer(BigInt::from(rank));
        let s_r = BigRational::from_integer(BigInt::from(stats.s));
        let s1_r = BigRational::from_integer(BigInt::from(stats.s1));
        let s2_r = BigRational::from_integer(BigInt::from(stats.s2));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let corollary = &rank_r - &s_r
            >= (&b / (&one + &b) * s1_r).max(half * s2_r);
        let ratio = rank_r * (&one + BigRational::from_usize(3).unwrap() * &b)
            >= (&one + BigRational::from_usize(4).unwrap() * &b) * s_r;
        (Some(corollary), Some(ratio))
    } else {
        (None, None)
    };
    Ok(CriticalRankReport {
        ell: stats.ell,
        s: stats.s,
        s1: stats.s1,
        s2: stats.s2,
        critical,
        revisits,
        rank,
        pass_corollary,
        pass_ratio,
    })
}

/// `ell - s`: how far a sequence is from all-distinct.
pub fn surplus(letters: &[u32]) -> usize {
    letters.len() - distinct_letters(letters)
}

/// The block maximizing `s2 / ell` (ties broken toward shorter, then
/// leftmost), and the lower bound `(a-1) / (a log2 n)` that applies when
/// the word is longer than its alphabet budget (`a = len / n > 1`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensestBlock {
    pub range: (usize, usize),
    pub s2: usize,
    pub ell: usize,
    pub ratio: f64,
    pub bound: Option<f64>,
}

impl DensestBlock {
    pub fn meets_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.ratio >= b)
    }
}

pub fn densest_block(word: &[u32], alphabet_n: usize) -> DensestBlock {
    assert!(!word.is_empty() && alphabet_n >= 1);
    let len = word.len();
    let mut remap: BTreeMap<u32, usize> = BTreeMap::new();
    let dense: Vec<usize> = word
        .iter()
        .map(|&x| {
            let next = remap.len();
            *remap.entry(x).or_insert(next)
        })
        .collect();
    let mut counts = vec![0u32; remap.len()];
    let mut stamp = vec![usize::MAX; remap.len()];
    let mut best = (0usize, 1usize, (0usize, 0usize)); // (s2, ell, range)
    for i in 0..len {
        let mut s2 = 0usize;
        for j in i..len {
            let x = dense[j];
            if stamp[x] != i {
                stamp[x] = i;
                counts[x] = 0;
            }
            counts[x] += 1;
            if counts[x] == 2 {
                s2 += 1;
            }
            let ell = j - i + 1;
            // s2/ell > best, or equal ratio with a shorter block.
            let lhs = s2 as u64 * best.1 as u64;
            let rhs = best.0 as u64 * ell as u64;
            if lhs > rhs || (lhs == rhs && s2 > 0 && ell < best.1) {
                best = (s2, ell, (i, j));
            }
        }
    }
    let a = len as f64 / alphabet_n as f64;
    let bound = (a > 1.0 && alphabet_n >= 2).then(|| (a - 1.0) / (a * (alphabet_n as f64).log2()));
    DensestBlock {
        range: best.2,
        s2: best.0,
        ell: best.1,
        ratio: best.0 as f64 / best.1 as f64,
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Brute-force criticality oracle with fresh per-block counting.
    fn is_critical_oracle(block: &[u32], beta: f64) -> bool {
        let ell = block.len();
        let sat = |b: &[u32]| b.len() as f64 >= (1.0 + beta) * distinct_letters(b) as f64;
        if !sat(block) {
            return false;
        }
        for i in 0..ell {
            for j in i..ell {
                if (i, j) != (0, ell - 1) && sat(&block[i..=j]) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn criticality_of_hand_examples() {
        assert!(is_critical(&[1, 2, 3, 1, 2, 3], 1.0));
        assert!(is_critical_oracle(&[1, 2, 3, 1, 2, 3], 1.0));
        assert!(is_critical(&[1, 1], 1.0));
        assert!(!is_critical(&[1, 2, 3, 4], 1.0));
        assert!(!is_critical(&[], 1.0));
        // One extra letter breaks minimality.
        assert!(!is_critical(&[1, 1, 2], 1.0));
    }

    #[test]
    fn criticality_matches_oracle_on_random_words() {
        let mut r = rng(1);
        for _ in 0..3000 {
            let ell = r.random_range(1..10usize);
            let alphabet = r.random_range(1..5u32);
            let word: Vec<u32> = (0..ell).map(|_| r.random_range(0..alphabet)).collect();
            for beta in [0.5, 1.0, 2.0] {
                assert_eq!(
                    is_critical(&word, beta),
                    is_critical_oracle(&word, beta),
                    "word {word:?} beta {beta}"
                );
            }
        }
    }

    #[test]
    fn find_critical_block_returns_a_minimal_witness() {
        let mut r = rng(2);
        let mut found = 0;
        for _ in 0..500 {
            let n = r.random_range(2..7usize);
            let word: Vec<u32> = (0..2 * n).map(|_| r.random_range(0..n as u32)).collect();
            let any = (0..word.len()).any(|i| {
                (i..word.len()).any(|j| {
                    let b = &word[i..=j];
                    b.len() >= 2 * distinct_letters(b)
                })
            });
            match find_critical_block(&word, 1.0) {
                None => assert!(!any, "missed a satisfying block in {word:?}"),
                Some((i, j)) => {
                    found += 1;
                    assert!(any);
                    let block = &word[i..=j];
                    assert!(is_critical_oracle(block, 1.0), "not critical: {block:?}");
                    let s = distinct_letters(block);
                    assert_eq!(block.len(), 2 * s); // ceil((1+1)s)
                }
            }
        }
        assert!(found > 100, "sweep produced too few critical blocks");
    }

    #[test]
    fn sequences_of_distinct_letters_have_no_critical_block() {
        let word: Vec<u32> = (0..12).collect();
        assert_eq!(find_critical_block(&word, 1.0), None);
    }

    #[test]
    fn fractional_beta_lengths_are_exact() {
        // beta = 0.5: min length is ceil(1.5 s).
        let lens = critical_min_lens(0.5, 6).unwrap();
        assert_eq!(lens, vec![0, 2, 3, 5, 6, 8, 9]);
        let b = find_critical_block(&[0, 1, 0, 1], 0.5);
        assert_eq!(b, Some((0, 2))); // (0,1,0): ell 3 >= 1.5 * 2
    }

    #[test]
    fn enumeration_small_s_counts() {
        // Regression values from the exhaustive search.
        let e1 = enumerate_critical_blocks(1, 1.0).unwrap();
        assert!(e1.blocks.is_empty());
        assert_eq!(e1.revisiting_skipped, 1); // (0,0)
        let e2 = enumerate_critical_blocks(2, 1.0).unwrap();
        assert!(e2.blocks.is_empty());
        assert_eq!(e2.revisiting_skipped, 1); // (0,1,0,1)
        let e3 = enumerate_critical_blocks(3, 1.0).unwrap();
        assert_eq!(e3.blocks.len(), 4);
        assert_eq!(e3.revisiting_skipped, 4);
        for block in [
            vec![0, 1, 0, 2, 0, 1],
            vec![0, 1, 0, 2, 1, 0],
            vec![0, 1, 2, 0, 1, 0],
            vec![0, 1, 2, 1, 0, 1],
        ] {
            assert!(e3.blocks.contains(&block), "missing {block:?}");
        }
        let e4 = enumerate_critical_blocks(4, 1.0).unwrap();
        assert_eq!(e4.blocks.len(), 94);
        assert_eq!(e4.revisiting_skipped, 27);
        assert!(enumerate_critical_blocks(7, 1.0).is_err());
        assert!(enumerate_critical_blocks(0, 1.0).is_err());
    }

    #[test]
    fn enumerated_blocks_are_critical_canonical_and_fresh() {
        for s in 1..=4usize {
            let e = enumerate_critical_blocks(s, 1.0).unwrap();
            for block in &e.blocks {
                assert_eq!(block.len(), 2 * s);
                assert_eq!(distinct_letters(block), s);
                assert!(is_critical_oracle(block, 1.0), "{block:?}");
                assert!(!revisits_state(block));
                // canonical: first occurrences in increasing order
                let mut seen = 0u32;
                for &x in block {
                    assert!(x <= seen);
                    if x == seen {
                        seen += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force_at_small_s() {
        for s in 2..=3usize {
            let mut expected = Vec::new();
            for code in 0..(s as u32).pow(2 * s as u32) {
                let mut w = Vec::with_capacity(2 * s);
                let mut c = code;
                for _ in 0..2 * s {
                    w.push(c % s as u32);
                    c /= s as u32;
                }
                let mut seen = 0u32;
                let mut canonical = true;
                for &x in &w {
                    if x > seen {
                        canonical = false;
                        break;
                    }
                    if x == seen {
                        seen += 1;
                    }
                }
                if !canonical || seen != s as u32 {
                    continue;
                }
                if !is_critical_oracle(&w, 1.0) || revisits_state(&w) {
                    continue;
                }
                expected.push(w);
            }
            let mut got = enumerate_critical_blocks(s, 1.0).unwrap().blocks;
            got.sort();
            expected.sort();
            assert_eq!(got, expected, "s = {s}");
        }
    }

    #[test]
    fn rank_check_on_the_s3_blocks() {
        let e = enumerate_critical_blocks(3, 1.0).unwrap();
        for block in &e.blocks {
            let report = check_critical_rank(block, 1.0).unwrap();
            assert_eq!(report.rank, 6, "{block:?}");
            assert!(report.critical);
            assert_eq!(report.pass_corollary, Some(true));
            assert_eq!(report.pass_ratio, Some(true));
        }
    }

    #[test]
    fn rank_check_marks_revisiting_blocks_not_applicable() {
        let report = check_critical_rank(&[0, 0], 1.0).unwrap();
        assert!(report.revisits);
        assert_eq!(report.pass_corollary, None);
        assert_eq!(report.pass_ratio, None);
    }

    /// Fresh per-block recount, independent of the incremental scan.
    fn densest_oracle(word: &[u32]) -> (usize, usize) {
        let mut best = (0usize, 1usize);
        for i in 0..word.len() {
            for j in i..word.len() {
                let block = &word[i..=j];
                let mut sorted = block.to_vec();
                sorted.sort_unstable();
                let mut s2 = 0;
                let mut k = 0;
                while k < sorted.len() {
                    let mut m = k;
                    while m < sorted.len() && sorted[m] == sorted[k] {
                        m += 1;
                    }
                    if m - k >= 2 {
                        s2 += 1;
                    }
                    k = m;
                }
                let ell = block.len();
                if s2 as u64 * best.1 as u64 > best.0 as u64 * ell as u64 {
                    best = (s2, ell);
                }
            }
        }
        best
    }

    #[test]
    fn densest_block_on_paired_letters() {
        // n distinct letters each twice: ratio 1/2, achieved by the
        // shortest doubled pair.
        let n = 8u32;
        let word: Vec<u32> = (0..n).flat_map(|x| [x, x]).collect();
        let d = densest_block(&word, n as usize);
        assert_eq!((d.s2, d.ell), (1, 2));
        assert_eq!(d.range, (0, 1));
        assert!((d.ratio - 0.5).abs() < 1e-15);
        let bound = d.bound.unwrap();
        assert!((bound - 1.0 / (2.0 * (n as f64).log2())).abs() < 1e-15);
        assert_eq!(d.meets_bound(), Some(true));
    }

    #[test]
    fn densest_block_of_distinct_word_is_zero() {
        let word: Vec<u32> = (0..9).collect();
        let d = densest_block(&word, 12);
        assert_eq!(d.s2, 0);
        assert_eq!(d.ratio, 0.0);
        assert!(d.bound.is_none()); // a <= 1: no asserted bound
    }

    #[test]
    fn densest_block_matches_fresh_recount() {
        let mut r = rng(3);
        for _ in 0..300 {
            let ell = r.random_range(1..40usize);
            let alphabet = r.random_range(1..10u32);
            let word: Vec<u32> = (0..ell).map(|_| r.random_range(0..alphabet)).collect();
            let d = densest_block(&word, alphabet as usize);
            let (s2, len) = densest_oracle(&word);
            assert_eq!(
                d.s2 as u64 * len as u64,
                s2 as u64 * d.ell as u64,
                "ratio mismatch on {word:?}"
            );
        }
    }

    #[test]
    fn concatenation_surplus_is_subadditive_up_to_s2() {
        let mut r = rng(4);
        for _ in 0..500 {
            let ell = r.random_range(2..30usize);
            let alphabet = r.random_range(1..8u32);
            let word: Vec<u32> = (0..ell).map(|_| r.random_range(0..alphabet)).collect();
            let cut = r.random_range(1..ell);
            let stats = seq_stats(&word);
            assert!(
                surplus(&word) <= surplus(&word[..cut]) + surplus(&word[cut..]) + stats.s2,
                "split {cut} of {word:?}"
            );
        }
    }
}
