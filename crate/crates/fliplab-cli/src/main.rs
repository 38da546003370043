use clap::{Args, Parser, Subcommand};
use fliplab_cli::config::{resolve_seed, FormatArg, KvConfig, ModelArg, RuleArg};
use fliplab_cli::driver::{
    cmd_critical, cmd_hunt_slow, cmd_plot, cmd_rank_audit, cmd_run, cmd_sparse_word,
    critical_jsonl, hunt_json, rank_audit_json, run_csv, run_json, sparse_json, sparse_word_text,
    traces_jsonl, HuntConfig, RankAuditConfig, RunConfig, SparseConfig,
};
use fliplab_cli::manifest::RunManifest;
use fliplab_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Laboratory for FLIP dynamics on smoothed max-cut instances: seeded
/// sweeps, exact rank audits, critical-block enumeration, sparse words,
/// and slow-sequence hunts.
#[derive(Parser)]
#[command(name = "fliplab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// FLIP sweeps over (n, trial) grids; emits run records as CSV or JSON.
    Run(RunArgs),
    /// Audit the move-matrix rank lower bounds on random sequences.
    RankAudit(RankAuditArgs),
    /// Enumerate critical blocks at small s and check their exact ranks.
    CriticalBlocks(CriticalArgs),
    /// Build words sparse at every scale and scan all their blocks.
    SparseWord(SparseArgs),
    /// Exhaustive search for slowly improving sequences at small n.
    HuntSlow(HuntArgs),
    /// Render the log-log scaling plot from a run CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Vertex count; repeat for a sweep.
    #[arg(long = "n")]
    ns: Vec<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Density bound of the uniform-window noise.
    #[arg(long)]
    phi: Option<f64>,
    /// Standard deviation of the truncated-gaussian noise.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    step_cap: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Base-weight file: one "u v w" triple per line.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Also emit per-trial traces (gains and moves).
    #[arg(long)]
    verbose: bool,
    /// key = value file mirroring these flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RankAuditArgs {
    #[arg(long)]
    sequences: Option<u64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    ell_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Generate unrestricted sequences and count the revisiting ones as
    /// skipped.
    #[arg(long)]
    include_revisiting: bool,
    /// Audit sequences from a JSONL file instead of generating them.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CriticalArgs {
    #[arg(long)]
    s_max: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SparseArgs {
    /// Length multiplier: the word has [a n] letters.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of independent words (seeds seed, seed+1, ...).
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for word files and the scan report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct HuntArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    target_len: Option<usize>,
    #[arg(long)]
    draws: Option<u64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Run CSV produced by the run subcommand.
    input: PathBuf,
    #[arg(long, default_value = "steps.svg")]
    out: PathBuf,
}

fn load_kv(path: &Option<PathBuf>) -> Result<KvConfig, CliError> {
    match path {
        Some(p) => KvConfig::load(p),
        None => Ok(KvConfig::default()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_cli() -> Result<(), CliError> {
    let cli = Cli::parse();
    let command_line = RunManifest::from_argv();
    match cli.cmd {
        Cmd::Run(args) => {
            let kv = load_kv(&args.config)?;
            let defaults = RunConfig::default();
            let ns = if args.ns.is_empty() {
                kv.get_list("n")?.unwrap_or(defaults.ns)
            } else {
                args.ns
            };
            let cfg = RunConfig {
                ns,
                trials: args.trials.or(kv.get("trials")?).unwrap_or(defaults.trials),
                model: args.model.or(kv.get("model")?).unwrap_or(defaults.model),
                phi: args.phi.or(kv.get("phi")?).unwrap_or(defaults.phi),
                sigma: args.sigma.or(kv.get("sigma")?).unwrap_or(defaults.sigma),
                rule: args.rule.or(kv.get("rule")?).unwrap_or(defaults.rule),
                seed: resolve_seed(args.seed, kv.get("seed")?, defaults.seed)?,
                step_cap: args.step_cap.or(kv.get("step-cap")?).unwrap_or(defaults.step_cap),
                jobs: args.jobs.or(kv.get("jobs")?).unwrap_or(defaults.jobs),
                base: args.base.or(kv.get::<String>("base")?.map(PathBuf::from)),
                verbose: args.verbose,
            };
            let manifest = RunManifest::new(command_line, &cfg, cfg.seed);
            let output = cmd_run(&cfg)?;
            let format = args.format.or(kv.get("format")?).unwrap_or(FormatArg::Csv);
            match format {
                FormatArg::Csv => {
                    emit(&args.out, &run_csv(&output, &manifest))?;
                    if cfg.verbose {
                        if let Some(path) = &args.out {
                            let tpath = path.with_extension("traces.jsonl");
                            std::fs::write(tpath, traces_jsonl(&output))?;
                        }
                    }
                }
                FormatArg::Json => emit(&args.out, &run_json(&output, &manifest, cfg.verbose))?,
            }
        }
        Cmd::RankAudit(args) => {
            let kv = load_kv(&args.config)?;
            let defaults = RankAuditConfig::default();
            let cfg = RankAuditConfig {
                sequences: args.sequences.or(kv.get("sequences")?).unwrap_or(defaults.sequences),
                n_max: args.n_max.or(kv.get("n-max")?).unwrap_or(defaults.n_max),
                ell_max: args.ell_max.or(kv.get("ell-max")?).unwrap_or(defaults.ell_max),
                seed: resolve_seed(args.seed, kv.get("seed")?, defaults.seed)?,
                include_revisiting: args.include_revisiting,
                input: args.input,
            };
            let manifest = RunManifest::new(command_line, &cfg, cfg.seed);
            let summary = cmd_rank_audit(&cfg)?;
            emit(&args.out, &rank_audit_json(&summary, &manifest))?;
            if summary.violations > 0 {
                return Err(CliError::FactCheck(format!(
                    "{} rank-bound violations (see report)",
                    summary.violations
                )));
            }
        }
        Cmd::CriticalBlocks(args) => {
            let kv = load_kv(&args.config)?;
            let s_max = args.s_max.or(kv.get("s-max")?).unwrap_or(4);
            let beta = args.beta.or(kv.get("beta")?).unwrap_or(1.0);
            let manifest = RunManifest::new(
                command_line,
                &serde_json::json!({ "s_max": s_max, "beta": beta }),
                0,
            );
            let reports = cmd_critical(s_max, beta)?;
            emit(&args.out, &critical_jsonl(&reports, &manifest))?;
            for report in &reports {
                eprintln!(
                    "s={} critical blocks: {} (revisiting skipped: {})",
                    report.s,
                    report.blocks.len(),
                    report.revisiting_skipped
                );
            }
        }
        Cmd::SparseWord(args) => {
            let kv = load_kv(&args.config)?;
            let cfg = SparseConfig {
                a: args.a.or(kv.get("a")?).unwrap_or(2.0),
                n: args.n.or(kv.get("n")?).unwrap_or(4096),
                seeds: args.seeds.or(kv.get("seeds")?).unwrap_or(1),
                seed: resolve_seed(args.seed, kv.get("seed")?, 0)?,
            };
            let manifest = RunManifest::new(command_line, &cfg, cfg.seed);
            let reports = cmd_sparse_word(&cfg)?;
            for report in &reports {
                if report.scan.stat_s_violations > 0 {
                    eprintln!(
                        "warning: seed {}: {} long blocks below d*ell/2 (statistical check)",
                        report.params.seed, report.scan.stat_s_violations
                    );
                }
                if report.scan.measured_c > report.scan.c_reference {
                    eprintln!(
                        "warning: seed {}: measured C {:.3} above the asymptotic reference {:.3}",
                        report.params.seed, report.scan.measured_c, report.scan.c_reference
                    );
                }
            }
            match &args.out {
                None => print!("{}", sparse_json(&reports, &manifest)),
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    for report in &reports {
                        let path = dir.join(format!("word_{}.txt", report.params.seed));
                        std::fs::write(path, sparse_word_text(&report.params, &manifest))?;
                    }
                    std::fs::write(dir.join("report.json"), sparse_json(&reports, &manifest))?;
                }
            }
        }
        Cmd::HuntSlow(args) => {
            let kv = load_kv(&args.config)?;
            let cfg = HuntConfig {
                n: args.n.or(kv.get("n")?).unwrap_or(5),
                eps: args.eps.or(kv.get("eps")?).unwrap_or(0.01),
                target_len: args.target_len.or(kv.get("target-len")?).unwrap_or(10),
                draws: args.draws.or(kv.get("draws")?).unwrap_or(100),
                phi: args.phi.or(kv.get("phi")?).unwrap_or(0.5),
                seed: resolve_seed(args.seed, kv.get("seed")?, 0)?,
            };
            let manifest = RunManifest::new(command_line, &cfg, cfg.seed);
            let report = cmd_hunt_slow(&cfg)?;
            emit(&args.out, &hunt_json(&report, &manifest))?;
        }
        Cmd::Plot(args) => {
            let manifest = RunManifest::new(
                command_line,
                &serde_json::json!({ "input": args.input.display().to_string() }),
                0,
            );
            let slope = cmd_plot(&args.input, &args.out, &manifest)?;
            eprintln!("slope = {slope:.6} -> {}", args.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run_cli() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fliplab: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
