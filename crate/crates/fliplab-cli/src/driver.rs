//! The experiment commands behind the CLI subcommands.

use crate::config::{ModelArg, RuleArg};
use crate::manifest::RunManifest;
use crate::plot::{loglog_slope, median_steps, render_svg};
use crate::records::{records_to_csv, RunRecord};
use crate::CliError;
use fliplab_core::blocks::{check_critical_rank, densest_block, enumerate_critical_blocks};
use fliplab_core::dynamics::{
    flip_run, hamiltonian, hunt_slow_sequences, SpinConfig, Termination, TraceExport,
    DEFAULT_EXHAUSTIVE_CAP,
};
use fliplab_core::movealg::{
    audit_rank_bounds, random_move_seq, random_nonrevisiting_seq, revisits_state, MoveSeq,
    RankAuditReport,
};
use fliplab_core::sparsewords::{
    build_sparse_word, gap_law_violations, scan_word, ScanReport, SparseWordParams,
};
use fliplab_core::weights::sample_weights;
use rand::Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn pivot_seed(master: u64, trial: u64) -> u64 {
    master ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub ns: Vec<usize>,
    pub trials: u64,
    pub model: ModelArg,
    pub phi: f64,
    pub sigma: f64,
    pub rule: RuleArg,
    pub seed: u64,
    pub step_cap: u64,
    /// 0 means the rayon default.
    pub jobs: usize,
    pub base: Option<PathBuf>,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ns: vec![64],
            trials: 10,
            model: ModelArg::Uniform,
            phi: 0.5,
            sigma: 0.25,
            rule: RuleArg::Best,
            seed: 0,
            step_cap: fliplab_core::dynamics::DEFAULT_STEP_CAP,
            jobs: 0,
            base: None,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub traces: Vec<TraceExport>,
}

/// One FLIP run per (n, trial), in parallel, records sorted by (n, trial).
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    if cfg.ns.is_empty() {
        return Err(CliError::Usage("at least one --n is required".to_string()));
    }
    if cfg.base.is_some() && cfg.ns.len() != 1 {
        return Err(CliError::Usage("base weights need a single --n".to_string()));
    }
    let jobs: Vec<(usize, u64)> = cfg
        .ns
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let worker = |&(n, trial): &(usize, u64)| -> Result<(RunRecord, TraceExport), CliError> {
        let model = cfg.model.build(
            cfg.phi,
            cfg.sigma,
            cfg.seed,
            cfg.base.as_deref(),
            Some(n),
        )?;
        let w = sample_weights(&model, n, trial).map_err(|e| CliError::Usage(e.to_string()))?;
        let s0 = SpinConfig::sample(n, cfg.seed, trial);
        let h0 = hamiltonian(&w, &s0).expect("sizes agree");
        let pivot = cfg.rule.to_pivot(pivot_seed(cfg.seed, trial));
        let started = Instant::now();
        let trace = flip_run(&w, &s0, pivot, cfg.step_cap).expect("sizes agree");
        let wall_time_ns = started.elapsed().as_nanos();
        let final_h = trace.final_h(h0);
        let record = RunRecord {
            n,
            seed: cfg.seed,
            trial,
            model: model.descriptor(),
            phi: model.phi(),
            rule: cfg.rule.name().to_string(),
            steps: trace.steps(),
            final_h,
            wall_time_ns,
            terminated: match trace.terminated {
                Termination::LocalMax => "local-max".to_string(),
                Termination::StepCap => "step-cap".to_string(),
            },
        };
        let export = trace.export(n, cfg.seed, &record.model, &record.rule, final_h, cfg.verbose);
        Ok((record, export))
    };
    let results: Result<Vec<_>, CliError> = if cfg.jobs == 0 {
        jobs.par_iter().map(worker).collect()
    } else {
        run_pool(cfg.jobs)?.install(|| jobs.par_iter().map(worker).collect())
    };
    let mut pairs = results?;
    pairs.sort_by_key(|(r, _)| (r.n, r.trial));
    let (records, traces) = pairs.into_iter().unzip();
    Ok(RunOutput { records, traces })
}

pub fn run_csv(out: &RunOutput, manifest: &RunManifest) -> String {
    records_to_csv(&out.records, manifest)
}

pub fn run_json(out: &RunOutput, manifest: &RunManifest, verbose: bool) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        manifest: &'a RunManifest,
        records: &'a [RunRecord],
        #[serde(skip_serializing_if = "Option::is_none")]
        traces: Option<&'a [TraceExport]>,
    }
    serde_json::to_string_pretty(&Doc {
        schema: "fliplab-run-v1",
        manifest,
        records: &out.records,
        traces: verbose.then_some(&out.traces[..]),
    })
    .expect("serializable")
}

/// Trace JSONL (one export per line), the verbose trace interface.
pub fn traces_jsonl(out: &RunOutput) -> String {
    out.traces
        .iter()
        .map(|t| serde_json::to_string(t).expect("serializable"))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

#[derive(Debug, Clone, Serialize)]
pub struct RankAuditConfig {
    pub sequences: u64,
    pub n_max: usize,
    pub ell_max: usize,
    pub seed: u64,
    pub include_revisiting: bool,
    pub input: Option<PathBuf>,
}

impl Default for RankAuditConfig {
    fn default() -> Self {
        RankAuditConfig {
            sequences: 10_000,
            n_max: 12,
            ell_max: 24,
            seed: 0,
            include_revisiting: false,
            input: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankAuditSummary {
    pub sequences_audited: u64,
    pub violations: u64,
    pub skipped_revisiting: u64,
    /// How often bound (iii) was tight (rank equal to the bound).
    pub bound_iii_tight: u64,
    pub failures: Vec<RankAuditReport>,
}

pub fn cmd_rank_audit(cfg: &RankAuditConfig) -> Result<RankAuditSummary, CliError> {
    let mut summary = RankAuditSummary {
        sequences_audited: 0,
        violations: 0,
        skipped_revisiting: 0,
        bound_iii_tight: 0,
        failures: Vec::new(),
    };
    let audit_one = |seq: &MoveSeq, summary: &mut RankAuditSummary| {
        let report = audit_rank_bounds(seq);
        summary.sequences_audited += 1;
        if report.rank == report.bound_iii {
            summary.bound_iii_tight += 1;
        }
        if !report.all_pass() {
            summary.violations += 1;
            summary.failures.push(report);
        }
    };
    if let Some(path) = &cfg.input {
        for (k, line) in std::fs::read_to_string(path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let seq = MoveSeq::from_json(line)
                .map_err(|e| CliError::Usage(format!("input line {}: {e}", k + 1)))?;
            if revisits_state(&seq.moves) {
                summary.skipped_revisiting += 1;
            } else {
                audit_one(&seq, &mut summary);
            }
        }
        return Ok(summary);
    }
    if cfg.n_max < 4 || cfg.ell_max < 2 {
        return Err(CliError::Usage("need n_max >= 4 and ell_max >= 2".to_string()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    while summary.sequences_audited < cfg.sequences {
        let n = rng.random_range(4..=cfg.n_max);
        let ell = rng.random_range(2..=cfg.ell_max.min(2 * n));
        let alphabet = rng.random_range(1..n);
        if cfg.include_revisiting {
            let seq = random_move_seq(n, ell, alphabet, &mut rng);
            if revisits_state(&seq.moves) {
                summary.skipped_revisiting += 1;
                continue;
            }
            audit_one(&seq, &mut summary);
        } else if let Some(seq) = random_nonrevisiting_seq(n, ell, alphabet, &mut rng, 100) {
            audit_one(&seq, &mut summary);
        }
    }
    Ok(summary)
}

pub fn rank_audit_json(summary: &RankAuditSummary, manifest: &RunManifest) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        manifest: &'a RunManifest,
        #[serde(flatten)]
        summary: &'a RankAuditSummary,
    }
    serde_json::to_string_pretty(&Doc { schema: "fliplab-rank-audit-v1", manifest, summary })
        .expect("serializable")
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalBlockLine {
    pub moves: Vec<u32>,
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    pub rank: usize,
    pub critical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalSReport {
    pub s: usize,
    pub target_len: usize,
    pub revisiting_skipped: usize,
    pub blocks: Vec<CriticalBlockLine>,
}

/// Enumerates and rank-checks all critical blocks for every `s <= s_max`.
/// With `beta = 1` the known small-`s` facts are enforced: none at s = 1, 2;
/// rank exactly 6 at s = 3; ranks {7, 8} both achieved at s = 4.
pub fn cmd_critical(s_max: usize, beta: f64) -> Result<Vec<CriticalSReport>, CliError> {
    let mut out = Vec::new();
    for s in 1..=s_max {
        let enumeration = enumerate_critical_blocks(s, beta).map_err(|e| match e {
            fliplab_core::blocks::BlocksError::AlphabetTooLarge { .. } => {
                CliError::Resource(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        })?;
        let mut blocks = Vec::with_capacity(enumeration.blocks.len());
        for moves in &enumeration.blocks {
            let report = check_critical_rank(moves, beta)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            if report.pass_corollary == Some(false) || report.pass_ratio == Some(false) {
                return Err(CliError::FactCheck(format!(
                    "critical block {moves:?} violates the rank corollary: {report:?}"
                )));
            }
            blocks.push(CriticalBlockLine {
                moves: moves.clone(),
                s: report.s,
                s1: report.s1,
                s2: report.s2,
                rank: report.rank,
                critical: true,
            });
        }
        if beta == 1.0 {
            check_small_s_facts(s, &blocks)?;
        }
        out.push(CriticalSReport {
            s,
            target_len: enumeration.target_len,
            revisiting_skipped: enumeration.revisiting_skipped,
            blocks,
        });
    }
    Ok(out)
}

fn check_small_s_facts(s: usize, blocks: &[CriticalBlockLine]) -> Result<(), CliError> {
    match s {
        1 | 2 => {
            if !blocks.is_empty() {
                return Err(CliError::FactCheck(format!(
                    "expected no critical blocks at s = {s}, found {}",
                    blocks.len()
                )));
            }
        }
        3 => {
            if blocks.is_empty() || blocks.iter().any(|b| b.rank != 6) {
                return Err(CliError::FactCheck(
                    "s = 3 critical blocks must all have rank 6".to_string(),
                ));
            }
        }
        4 => {
            let mut seen7 = false;
            let mut seen8 = false;
            for b in blocks {
                match b.rank {
                    7 => seen7 = true,
                    8 => seen8 = true,
                    other => {
                        return Err(CliError::FactCheck(format!(
                            "s = 4 critical block {:?} has rank {other}, expected 7 or 8",
                            b.moves
                        )))
                    }
                }
            }
            if !(seen7 && seen8) {
                return Err(CliError::FactCheck(
                    "s = 4 must achieve both rank 7 and rank 8".to_string(),
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

/// JSON lines: a manifest line, then one line per block.
pub fn critical_jsonl(reports: &[CriticalSReport], manifest: &RunManifest) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"schema\":\"fliplab-critical-v1\",\"manifest\":{}}}\n",
        manifest.to_json()
    ));
    for report in reports {
        for block in &report.blocks {
            out.push_str(&serde_json::to_string(block).expect("serializable"));
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SparseConfig {
    pub a: f64,
    pub n: usize,
    pub seeds: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SparseRunReport {
    pub params: SparseWordParams,
    pub scan: ScanReport,
    pub densest_ratio: f64,
    pub densest_bound: Option<f64>,
    pub gap_violations: usize,
    /// `(max s2/s) * ln n`, the tightness-table constant.
    pub measured_c: f64,
}

/// Builds one word per seed and scans it. Deterministic violations are
/// fact-check failures; statistical ones are left in the report for the
/// caller to warn about.
pub fn cmd_sparse_word(cfg: &SparseConfig) -> Result<Vec<SparseRunReport>, CliError> {
    let mut out = Vec::new();
    for k in 0..cfg.seeds {
        let params = SparseWordParams::derive(cfg.a, cfg.n, cfg.seed.wrapping_add(k))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let word = build_sparse_word(&params);
        let scan = scan_word(&word, &params);
        if !scan.deterministic_ok() {
            return Err(CliError::FactCheck(format!(
                "deterministic sparse-word invariant failed for seed {}: {scan:?}",
                params.seed
            )));
        }
        let gap_violations = gap_law_violations(&word, &params);
        if gap_violations > 0 {
            return Err(CliError::FactCheck(format!(
                "gap law violated {gap_violations} times for seed {}",
                params.seed
            )));
        }
        let densest = densest_block(word.letters(), cfg.n);
        out.push(SparseRunReport {
            measured_c: scan.measured_c,
            densest_ratio: densest.ratio,
            densest_bound: densest.bound,
            gap_violations,
            params,
            scan,
        });
    }
    Ok(out)
}

/// Builds the word for one report entry again (words are pure functions of
/// their params) and renders the export text.
pub fn sparse_word_text(params: &SparseWordParams, manifest: &RunManifest) -> String {
    let word = build_sparse_word(params);
    let mut text = word.to_text(params);
    text.push_str(&format!("# manifest: {}\n", manifest.to_json()));
    text
}

pub fn sparse_json(reports: &[SparseRunReport], manifest: &RunManifest) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        manifest: &'a RunManifest,
        runs: &'a [SparseRunReport],
    }
    serde_json::to_string_pretty(&Doc { schema: "fliplab-sparse-v1", manifest, runs: reports })
        .expect("serializable")
}

#[derive(Debug, Clone, Serialize)]
pub struct HuntConfig {
    pub n: usize,
    pub eps: f64,
    pub target_len: usize,
    pub draws: u64,
    pub phi: f64,
    pub seed: u64,
}

pub const HUNT_N_CAP: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct HuntDraw {
    pub trial: u64,
    pub witness: Option<MoveSeq>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HuntReport {
    pub witnesses_found: u64,
    pub draws: Vec<HuntDraw>,
}

/// Exhaustive slow-sequence hunts over independent weight draws. Each draw
/// yields a witness or an exhaustive none-certificate.
pub fn cmd_hunt_slow(cfg: &HuntConfig) -> Result<HuntReport, CliError> {
    if cfg.n > HUNT_N_CAP {
        return Err(CliError::Resource(format!(
            "hunt-slow is exhaustive over 2^n states; n = {} exceeds {HUNT_N_CAP}",
            cfg.n
        )));
    }
    let model = fliplab_core::weights::WeightModel::uniform_window(cfg.phi, cfg.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut draws = Vec::with_capacity(cfg.draws as usize);
    let mut witnesses_found = 0;
    for trial in 0..cfg.draws {
        let w = sample_weights(&model, cfg.n, trial).map_err(|e| CliError::Usage(e.to_string()))?;
        let witness = hunt_slow_sequences(&w, cfg.eps, cfg.target_len, DEFAULT_EXHAUSTIVE_CAP)
            .map_err(|e| CliError::Resource(e.to_string()))?;
        if witness.is_some() {
            witnesses_found += 1;
        }
        draws.push(HuntDraw { trial, witness });
    }
    Ok(HuntReport { witnesses_found, draws })
}

pub fn hunt_json(report: &HuntReport, manifest: &RunManifest) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        manifest: &'a RunManifest,
        #[serde(flatten)]
        report: &'a HuntReport,
    }
    serde_json::to_string_pretty(&Doc { schema: "fliplab-hunt-v1", manifest, report })
        .expect("serializable")
}

/// Reads a run CSV, renders the scaling plot, writes it, and returns the
/// fitted slope. Nothing is written when the CSV has no data rows.
pub fn cmd_plot(input: &Path, out: &Path, manifest: &RunManifest) -> Result<f64, CliError> {
    let text = std::fs::read_to_string(input)?;
    let records = crate::records::records_from_csv(&text)?;
    let svg = render_svg(&records, manifest)?;
    let slope = loglog_slope(&median_steps(&records));
    std::fs::write(out, svg)?;
    Ok(slope)
}
