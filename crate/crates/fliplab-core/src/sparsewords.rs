//! Construction and verification of words that are sparse at every scale.
//!
//! Stage one writes the potentially repeated letters: for each index
//! `i` in `[b0, b1)` the positions are split into chunks of size
//! `gamma * i`, one uniform position per chunk receives letter `i` (even
//! chunks) or its primed twin (odd chunks), later indices overwriting
//! earlier ones. Stage two fills every untouched position with a fresh
//! unique letter. Chunk draws are keyed by `(seed, i, chunk)`, so the first
//! `ell` positions do not depend on where the word is truncated.

use crate::rng::{keyed_rng, DOMAIN_WORD_CHUNK};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("a must exceed 1, got {0}")]
    InvalidA(f64),
    #[error("n = {n} is too small for the parameter formulas: {detail}")]
    ParamsTooSmall { n: usize, detail: String },
    #[error("invalid raw parameters: {0}")]
    InvalidParams(String),
    #[error("enumeration size {size} exceeds the cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("negative-correlation input invalid: {0}")]
    InvalidSetSystem(String),
}

/// Nearest integer, ties rounding up (the bracket convention used for all
/// derived parameters).
fn bracket(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseWordParams {
    pub a: f64,
    pub n: usize,
    pub b0: u64,
    pub b1: u64,
    pub gamma: u64,
    pub seed: u64,
    pub ell: usize,
}

impl SparseWordParams {
    /// Parameters from the standard formulas: `b0 = [ln n]`,
    /// `b1 = [sqrt n]`, `gamma = [ln n / (2 ln 2a)]`, `ell = [a n]`.
    pub fn derive(a: f64, n: usize, seed: u64) -> Result<Self, SparseError> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(SparseError::InvalidA(a));
        }
        let ln_n = (n as f64).ln();
        let b0 = bracket(ln_n);
        let b1 = bracket((n as f64).sqrt());
        let gamma = bracket(ln_n / (2.0 * (2.0 * a).ln()));
        if b0 < 1 || gamma < 1 || b0 >= b1 {
            return Err(SparseError::ParamsTooSmall {
                n,
                detail: format!("b0={b0} b1={b1} gamma={gamma}"),
            });
        }
        Ok(SparseWordParams { a, n, b0, b1, gamma, seed, ell: bracket(a * n as f64) as usize })
    }

    /// Explicit parameters; `b0 == b1` gives the degenerate all-unique
    /// word. `ell` is still `[a n]`.
    pub fn raw(a: f64, n: usize, b0: u64, b1: u64, gamma: u64, seed: u64) -> Result<Self, SparseError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(SparseError::InvalidA(a));
        }
        if b0 < 1 || b1 < b0 || gamma < 1 {
            return Err(SparseError::InvalidParams(format!("b0={b0} b1={b1} gamma={gamma}")));
        }
        let ell = bracket(a * n as f64) as usize;
        if ell == 0 {
            return Err(SparseError::InvalidParams("empty word".to_string()));
        }
        Ok(SparseWordParams { a, n, b0, b1, gamma, seed, ell })
    }

    /// Number of potentially repeated letters (an `i` and a primed twin
    /// per index).
    pub fn pool_size(&self) -> usize {
        2 * (self.b1 - self.b0) as usize
    }

    /// Chunk-size index of a stage-one letter id.
    pub fn letter_index(&self, id: u32) -> Option<u64> {
        ((id as usize) < self.pool_size()).then(|| self.b0 + id as u64 / 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mark {
    StageOne,
    StageTwo,
}

/// A constructed word: letter ids plus the stage that wrote each position.
/// Stage-two ids start at `pool_size` and increase left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    letters: Vec<u32>,
    marks: Vec<Mark>,
}

impl Word {
    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn distinct_letters(&self) -> usize {
        let mut ids = self.letters.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Text export: one letter id per line after a parameter header.
    pub fn to_text(&self, p: &SparseWordParams) -> String {
        let mut out = String::new();
        out.push_str("# fliplab sparse word v1\n");
        out.push_str(&format!(
            "# a={} n={} b0={} b1={} gamma={} seed={} ell={}\n",
            p.a, p.n, p.b0, p.b1, p.gamma, p.seed, p.ell
        ));
        for &x in &self.letters {
            out.push_str(&format!("{x}\n"));
        }
        out
    }
}

const EMPTY: u32 = u32::MAX;

pub fn build_sparse_word(p: &SparseWordParams) -> Word {
    let ell = p.ell;
    let mut letters = vec![EMPTY; ell];
    for i in p.b0..p.b1 {
        let chunk = (p.gamma * i) as usize;
        let last_chunk = (ell - 1) / chunk;
        for k in 0..=last_chunk {
            // The chunk is sampled in full even when it straddles the
            // truncation point, matching the infinite construction.
            let off = keyed_rng(DOMAIN_WORD_CHUNK, p.seed, i, k as u64)
                .random_range(0..chunk);
            let pos = k * chunk + off;
            if pos < ell {
                letters[pos] = (2 * (i - p.b0)) as u32 + (k as u32 & 1);
            }
        }
    }
    let mut marks = vec![Mark::StageOne; ell];
    let mut next = p.pool_size() as u32;
    for (pos, letter) in letters.iter_mut().enumerate() {
        if *letter == EMPTY {
            *letter = next;
            next += 1;
            marks[pos] = Mark::StageTwo;
        }
    }
    Word { letters, marks }
}

/// Positions where consecutive occurrences of a stage-one letter sit closer
/// than its chunk size `gamma * i` (zero by construction).
pub fn gap_law_violations(word: &Word, p: &SparseWordParams) -> usize {
    let mut last_seen: Vec<Option<usize>> = vec![None; p.pool_size()];
    let mut violations = 0;
    for (pos, &id) in word.letters.iter().enumerate() {
        let Some(i) = p.letter_index(id) else { continue };
        if let Some(prev) = last_seen[id as usize] {
            if pos - prev < (p.gamma * i) as usize {
                violations += 1;
            }
        }
        last_seen[id as usize] = Some(pos);
    }
    violations
}

/// The probability that a position is left empty by stage one,
/// `d = prod_{i=b0}^{b1-1} (1 - 1/(gamma i))`, with the closed-form
/// sandwich `((b0-1)/(b1-1))^(1/gamma) <= d <= (b0/b1)^(1/gamma)`.
#[derive(Debug, Clone)]
pub struct FillProbability {
    pub b0: u64,
    pub b1: u64,
    pub gamma: u64,
    /// f64 view of the exact product.
    pub d: f64,
    pub lower: f64,
    pub upper: f64,
    d_exact: BigRational,
}

impl FillProbability {
    pub fn d_exact(&self) -> &BigRational {
        &self.d_exact
    }

    /// Checks the sandwich exactly: `(b0-1)/(b1-1) <= d^gamma <= b0/b1`
    /// in rational arithmetic (no precision limit).
    pub fn within_bounds_exact(&self) -> bool {
        let g = self.gamma as i32;
        let d_pow = self.d_exact.pow(g);
        let lower = BigRational::new(BigInt::from(self.b0 - 1), BigInt::from(self.b1 - 1));
        let upper = BigRational::new(BigInt::from(self.b0), BigInt::from(self.b1));
        lower <= d_pow && d_pow <= upper
    }
}

pub fn stage_fill_probability(b0: u64, b1: u64, gamma: u64) -> FillProbability {
    assert!(b0 >= 1 && b1 > b0 && gamma >= 1);
    let mut d_exact = BigRational::one();
    let mut d = 1.0f64;
    for i in b0..b1 {
        let gi = gamma * i;
        d_exact *= BigRational::new(BigInt::from(gi - 1), BigInt::from(gi));
        d *= 1.0 - 1.0 / gi as f64;
    }
    let lower = (((b0 - 1) as f64) / ((b1 - 1) as f64)).powf(1.0 / gamma as f64);
    let upper = ((b0 as f64) / (b1 as f64)).powf(1.0 / gamma as f64);
    FillProbability { b0, b1, gamma, d, lower, upper, d_exact }
}

/// Result of the all-blocks scan of a word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub ell: usize,
    pub blocks_scanned: u64,
    pub letters_used: usize,
    /// Blocks with `s2(B) > 2 ell(B) / gamma` (certain to be zero).
    pub det_ratio_violations: u64,
    /// Short blocks (`ell <= gamma b0`) containing a repeat (certain zero).
    pub det_short_violations: u64,
    /// Long blocks with `s(B) < d ell(B) / 2` (holds with high
    /// probability, not surely).
    pub stat_s_violations: u64,
    pub max_s2_over_s: f64,
    pub max_s2_over_s_witness: (usize, usize, (usize, usize)),
    pub max_s2_over_ell: f64,
    pub max_s2_over_ell_witness: (usize, usize, (usize, usize)),
    pub d: f64,
    /// Measured constant: `(max s2/s) * ln n`.
    pub measured_c: f64,
    /// Reference constant `9 a ln a` (asymptotic; reported, not asserted).
    pub c_reference: f64,
}

impl ScanReport {
    pub fn deterministic_ok(&self) -> bool {
        self.det_ratio_violations == 0 && self.det_short_violations == 0
    }
}

/// Scans every block of the word, O(len^2) with incremental letter counts.
pub fn scan_word(word: &Word, p: &SparseWordParams) -> ScanReport {
    let letters = &word.letters;
    let len = letters.len();
    let max_id = letters.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u32; max_id + 1];
    let mut stamp = vec![usize::MAX; max_id + 1];
    let d = if p.b0 < p.b1 {
        stage_fill_probability(p.b0, p.b1, p.gamma).d
    } else {
        1.0
    };
    let short_cap = (p.gamma * p.b0) as usize;
    let mut report = ScanReport {
        ell: len,
        blocks_scanned: 0,
        letters_used: word.distinct_letters(),
        det_ratio_violations: 0,
        det_short_violations: 0,
        stat_s_violations: 0,
        max_s2_over_s: 0.0,
        max_s2_over_s_witness: (0, 1, (0, 0)),
        max_s2_over_ell: 0.0,
        max_s2_over_ell_witness: (0, 1, (0, 0)),
        d,
        measured_c: 0.0,
        c_reference: 9.0 * p.a * p.a.ln(),
    };
    let mut best_ss = (0usize, 1usize, (0usize, 0usize));
    let mut best_sl = (0usize, 1usize, (0usize, 0usize));
    for i in 0..len {
        let mut s = 0usize;
        let mut s2 = 0usize;
        for j in i..len {
            let x = letters[j] as usize;
            if stamp[x] != i {
                stamp[x] = i;
                counts[x] = 0;
            }
            counts[x] += 1;
            match counts[x] {
                1 => s += 1,
                2 => s2 += 1,
                _ => {}
            }
            let ell = j - i + 1;
            report.blocks_scanned += 1;
            if (s2 as u64) * p.gamma > 2 * ell as u64 {
                report.det_ratio_violations += 1;
            }
            if ell <= short_cap {
                if s2 > 0 {
                    report.det_short_violations += 1;
                }
            } else if 2.0 * (s as f64) < d * ell as f64 {
                report.stat_s_violations += 1;
            }
            if s2 as u64 * best_ss.1 as u64 > best_ss.0 as u64 * s as u64 {
                best_ss = (s2, s, (i, j));
            }
            if s2 as u64 * best_sl.1 as u64 > best_sl.0 as u64 * ell as u64 {
                best_sl = (s2, ell, (i, j));
            }
        }
    }
    report.max_s2_over_s = best_ss.0 as f64 / best_ss.1 as f64;
    report.max_s2_over_s_witness = best_ss;
    report.max_s2_over_ell = best_sl.0 as f64 / best_sl.1 as f64;
    report.max_s2_over_ell_witness = best_sl;
    report.measured_c = report.max_s2_over_s * (p.n as f64).ln();
    report
}

const NEGCORR_ENUMERATION_CAP: u128 = 10_000_000;

/// Exact conditional probabilities for the "element never picked" events
/// of an independent uniform selection from each set, by full enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegCorrReport {
    pub total: u64,
    pub t_unpicked: u64,
    pub cond_unpicked: u64,
    pub joint_unpicked: u64,
    pub t_picked: u64,
    pub cond_picked: u64,
    pub joint_picked: u64,
    /// `P(U_t | all of S unpicked) <= P(U_t)`; `None` when vacuous.
    pub ineq_unpicked: Option<bool>,
    /// `P(U_t^c | all of S picked) <= P(U_t^c)`; `None` when vacuous.
    pub ineq_picked: Option<bool>,
}

impl NegCorrReport {
    pub fn all_hold(&self) -> bool {
        self.ineq_unpicked.unwrap_or(true) && self.ineq_picked.unwrap_or(true)
    }
}

pub fn negcorr_exhaustive(
    sets: &[Vec<u32>],
    t: u32,
    cond: &[u32],
) -> Result<NegCorrReport, SparseError> {
    if sets.is_empty() || sets.iter().any(|a| a.is_empty()) {
        return Err(SparseError::InvalidSetSystem("sets must be nonempty".to_string()));
    }
    if cond.contains(&t) {
        return Err(SparseError::InvalidSetSystem("t must not be in S".to_string()));
    }
    let size: u128 = sets.iter().map(|a| a.len() as u128).product();
    if size > NEGCORR_ENUMERATION_CAP {
        return Err(SparseError::EnumerationTooLarge { size, cap: NEGCORR_ENUMERATION_CAP });
    }

    let mut idx = vec![0usize; sets.len()];
    let mut report = NegCorrReport {
        total: 0,
        t_unpicked: 0,
        cond_unpicked: 0,
        joint_unpicked: 0,
        t_picked: 0,
        cond_picked: 0,
        joint_picked: 0,
        ineq_unpicked: None,
        ineq_picked: None,
    };
    loop {
        let picked = |x: u32| idx.iter().zip(sets).any(|(&k, a)| a[k] == x);
        let t_p = picked(t);
        let all_cond_unpicked = cond.iter().all(|&s| !picked(s));
        let all_cond_picked = cond.iter().all(|&s| picked(s));
        report.total += 1;
        if !t_p {
            report.t_unpicked += 1;
        } else {
            report.t_picked += 1;
        }
        if all_cond_unpicked {
            report.cond_unpicked += 1;
            if !t_p {
                report.joint_unpicked += 1;
            }
        }
        if all_cond_picked {
            report.cond_picked += 1;
            if t_p {
                report.joint_picked += 1;
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == sets.len() {
                break;
            }
            idx[pos] += 1;
            if idx[pos] < sets[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == sets.len() {
            break;
        }
    }
    // Cross-multiplied exact comparisons.
    if report.cond_unpicked > 0 {
        report.ineq_unpicked = Some(
            report.joint_unpicked as u128 * report.total as u128
                <= report.t_unpicked as u128 * report.cond_unpicked as u128,
        );
    }
    if report.cond_picked > 0 {
        report.ineq_picked = Some(
            report.joint_picked as u128 * report.total as u128
                <= report.t_picked as u128 * report.cond_picked as u128,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derived_parameters_match_the_formulas() {
        let p = SparseWordParams::derive(2.0, 4096, 17).unwrap();
        assert_eq!((p.b0, p.b1, p.gamma, p.ell), (8, 64, 3, 8192));
        assert_eq!(p.pool_size(), 112);
        assert!(SparseWordParams::derive(1.0, 4096, 0).is_err());
        assert!(SparseWordParams::derive(2.0, 2, 0).is_err());
    }

    #[test]
    fn gamma_is_nonincreasing_in_a() {
        let n = 1 << 16;
        let gammas: Vec<u64> = [1.2, 1.5, 2.0, 3.0, 5.0, 9.0]
            .iter()
            .map(|&a| SparseWordParams::derive(a, n, 0).unwrap().gamma)
            .collect();
        for w in gammas.windows(2) {
            assert!(w[0] >= w[1], "{gammas:?}");
        }
    }

    #[test]
    fn b0_over_b1_vanishes_with_n() {
        let ratios: Vec<f64> = [1 << 10, 1 << 14, 1 << 18]
            .iter()
            .map(|&n| {
                let p = SparseWordParams::derive(2.0, n, 0).unwrap();
                p.b0 as f64 / p.b1 as f64
            })
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2]);
        assert!(ratios[2] < 0.05);
    }

    #[test]
    fn construction_is_deterministic() {
        let p = SparseWordParams::derive(2.0, 512, 5).unwrap();
        assert_eq!(build_sparse_word(&p), build_sparse_word(&p));
        let p2 = SparseWordParams { seed: 6, ..p.clone() };
        assert_ne!(build_sparse_word(&p), build_sparse_word(&p2));
    }

    #[test]
    fn degenerate_pool_gives_all_unique_letters() {
        let p = SparseWordParams::raw(1.5, 100, 5, 5, 2, 9).unwrap();
        let w = build_sparse_word(&p);
        assert_eq!(w.len(), 150);
        assert!(w.marks().iter().all(|&m| m == Mark::StageTwo));
        assert_eq!(w.distinct_letters(), 150);
    }

    #[test]
    fn stage_one_respects_the_gap_law() {
        for seed in 0..5 {
            let p = SparseWordParams::derive(2.0, 1024, seed).unwrap();
            let w = build_sparse_word(&p);
            assert_eq!(gap_law_violations(&w, &p), 0);
            // Stage-one letters come from the pool, stage-two are fresh
            // and unique.
            let pool = p.pool_size() as u32;
            let mut seen_stage2 = std::collections::HashSet::new();
            for (pos, &id) in w.letters().iter().enumerate() {
                match w.marks()[pos] {
                    Mark::StageOne => assert!(id < pool),
                    Mark::StageTwo => {
                        assert!(id >= pool);
                        assert!(seen_stage2.insert(id));
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_point_does_not_affect_the_prefix() {
        let short = SparseWordParams::raw(1.0, 500, 4, 12, 2, 3).unwrap();
        let long = SparseWordParams::raw(2.0, 500, 4, 12, 2, 3).unwrap();
        assert!(long.ell > short.ell);
        let ws = build_sparse_word(&short);
        let wl = build_sparse_word(&long);
        assert_eq!(ws.letters(), &wl.letters()[..short.ell]);
        assert_eq!(ws.marks(), &wl.marks()[..short.ell]);
    }

    #[test]
    fn positions_hold_the_last_writer() {
        // Replay stage one with explicit (index, chunk) bookkeeping and
        // check the overwrite order: larger indices win.
        let p = SparseWordParams::raw(2.0, 300, 3, 9, 2, 11).unwrap();
        let w = build_sparse_word(&p);
        let mut writes: Vec<Vec<(u64, u32)>> = vec![Vec::new(); p.ell];
        for i in p.b0..p.b1 {
            let chunk = (p.gamma * i) as usize;
            for k in 0..=(p.ell - 1) / chunk {
                let off = keyed_rng(DOMAIN_WORD_CHUNK, p.seed, i, k as u64)
                    .random_range(0..chunk);
                let pos = k * chunk + off;
                if pos < p.ell {
                    writes[pos].push((i, (2 * (i - p.b0)) as u32 + (k as u32 & 1)));
                }
            }
        }
        for (pos, ws) in writes.iter().enumerate() {
            match ws.iter().max_by_key(|&&(i, _)| i) {
                None => assert_eq!(w.marks()[pos], Mark::StageTwo),
                Some(&(_, id)) => {
                    assert_eq!(w.marks()[pos], Mark::StageOne);
                    assert_eq!(w.letters()[pos], id);
                }
            }
        }
    }

    #[test]
    fn stage_two_density_concentrates_near_d() {
        let p = SparseWordParams::derive(2.0, 2048, 21).unwrap();
        let w = build_sparse_word(&p);
        let d = stage_fill_probability(p.b0, p.b1, p.gamma).d;
        let count = w.marks().iter().filter(|&&m| m == Mark::StageTwo).count() as f64;
        let mean = d * p.ell as f64;
        let sd = (p.ell as f64 * d * (1.0 - d)).sqrt();
        assert!(
            (count - mean).abs() <= 3.0 * sd,
            "stage-two count {count} vs {mean} +- 3*{sd}"
        );
    }

    #[test]
    fn fill_probability_small_case_is_exact() {
        let f = stage_fill_probability(2, 4, 2);
        // (1 - 1/4)(1 - 1/6) = 5/8
        assert_eq!(f.d_exact(), &BigRational::new(BigInt::from(5), BigInt::from(8)));
        assert!((f.d - 0.625).abs() < 1e-15);
        assert!((f.lower - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((f.upper - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(f.within_bounds_exact());
        assert!(f.lower <= f.d && f.d <= f.upper);
    }

    #[test]
    fn fill_probability_tends_to_one_in_gamma() {
        let mut prev = 0.0;
        for gamma in [1u64, 2, 4, 16, 64, 1024] {
            let f = stage_fill_probability(3, 9, gamma);
            assert!(f.within_bounds_exact());
            assert!(f.d >= prev);
            prev = f.d;
        }
        assert!(prev > 0.99);
    }

    #[test]
    fn fill_probability_tends_to_half_window() {
        // With the derived parameters d approaches 1/(2a) from above.
        let mut gaps = Vec::new();
        for n in [1usize << 12, 1 << 16, 1 << 20] {
            let p = SparseWordParams::derive(2.0, n, 0).unwrap();
            let f = stage_fill_probability(p.b0, p.b1, p.gamma);
            assert!(f.within_bounds_exact());
            gaps.push((f.d - 0.25).abs());
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn scan_deterministic_checks_hold_by_construction() {
        let p = SparseWordParams::derive(2.0, 512, 33).unwrap();
        let w = build_sparse_word(&p);
        let report = scan_word(&w, &p);
        assert!(report.deterministic_ok(), "{report:?}");
        assert_eq!(report.blocks_scanned, (p.ell * (p.ell + 1) / 2) as u64);
        assert!(report.max_s2_over_ell <= report.max_s2_over_s);
    }

    #[test]
    fn scan_of_distinct_word_reports_zero_ratios() {
        let p = SparseWordParams::raw(1.0, 64, 4, 4, 2, 0).unwrap();
        let w = build_sparse_word(&p);
        let report = scan_word(&w, &p);
        assert_eq!(report.max_s2_over_s, 0.0);
        assert_eq!(report.max_s2_over_ell, 0.0);
        assert_eq!(report.letters_used, 64);
        assert!(report.deterministic_ok());
    }

    #[test]
    fn negcorr_hand_example() {
        let sets = vec![vec![1u32, 2], vec![1, 2, 3]];
        let report = negcorr_exhaustive(&sets, 1, &[2]).unwrap();
        assert_eq!(report.total, 6);
        assert_eq!(report.t_unpicked, 2);
        assert_eq!(report.cond_unpicked, 2);
        assert_eq!(report.joint_unpicked, 0);
        assert_eq!(report.t_picked, 4);
        assert_eq!(report.cond_picked, 4);
        assert_eq!(report.joint_picked, 2);
        assert_eq!(report.ineq_unpicked, Some(true));
        assert_eq!(report.ineq_picked, Some(true));
    }

    #[test]
    fn negcorr_empty_condition_is_equality() {
        let sets = vec![vec![1u32, 2], vec![2, 3]];
        let report = negcorr_exhaustive(&sets, 2, &[]).unwrap();
        // Conditioning on nothing: both sides equal, inequalities tight.
        assert_eq!(report.cond_unpicked, report.total);
        assert_eq!(report.joint_unpicked, report.t_unpicked);
        assert_eq!(report.ineq_unpicked, Some(true));
        assert_eq!(report.ineq_picked, Some(true));
    }

    #[test]
    fn negcorr_rejects_bad_input() {
        assert!(negcorr_exhaustive(&[], 0, &[]).is_err());
        assert!(negcorr_exhaustive(&[vec![]], 0, &[]).is_err());
        assert!(negcorr_exhaustive(&[vec![1]], 1, &[1]).is_err());
        let huge = vec![vec![0u32; 200]; 4];
        assert!(matches!(
            negcorr_exhaustive(&huge, 0, &[]),
            Err(SparseError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn negcorr_random_systems_never_violate() {
        let mut r = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let m = r.random_range(1..=4usize);
            let sets: Vec<Vec<u32>> = (0..m)
                .map(|_| {
                    let k = r.random_range(1..=4usize);
                    (0..k).map(|_| r.random_range(0..6u32)).collect()
                })
                .collect();
            let t = r.random_range(0..6u32);
            let cond: Vec<u32> = (0..6u32)
                .filter(|&x| x != t && r.random::<f64>() < 0.3)
                .collect();
            let report = negcorr_exhaustive(&sets, t, &cond).unwrap();
            assert!(report.all_hold(), "sets {sets:?} t {t} cond {cond:?}: {report:?}");
        }
    }

    #[test]
    fn word_text_has_header_and_all_letters() {
        let p = SparseWordParams::raw(1.0, 20, 2, 4, 2, 1).unwrap();
        let w = build_sparse_word(&p);
        let text = w.to_text(&p);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# fliplab sparse word"));
        assert!(lines.next().unwrap().contains("seed=1"));
        assert_eq!(lines.count(), 20);
    }
}
