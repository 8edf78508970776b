//! `sosx` experiment harness.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error,
//! 3 solver non-convergence in some row, 4 verifier counterexample.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use sosx::exec::{map_slice, set_thread_cap, Exec};
use sosx::experiment::{
    build_instance, fmt_sig, run_sweep, run_verify, solve_instance, write_csv, ConfigError, ExperimentConfig,
    VerifyTask,
};
use sosx::graphs::write_edge_list;
use sosx::rounding::RoundingReport;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;
const EXIT_COUNTEREXAMPLE: u8 = 4;

#[derive(Parser)]
#[command(name = "sosx", version, about = "Sum-of-squares rounding experiments on expander graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one instance per seed (JSON record and edge list) into the
    /// output directory.
    Generate(Common),
    /// Solve the relaxation of the first configured algorithm and write one
    /// pseudo-distribution per seed into the output directory.
    Solve(Common),
    /// Run every configured algorithm and write one JSON report per cell
    /// into the output directory.
    Round(Common),
    /// Run lemma checks and write their reports to the output file.
    Verify(VerifyArgs),
    /// Run the sweep and write one CSV row per cell to the output file.
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file or directory; defaults to the configured output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the configured seed list with a single seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Run only this lemma (for example `clustering-is`), with default
    /// parameters and the configured `eps`.
    #[arg(long)]
    lemma: Option<String>,
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Config(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn thread_cap() -> Option<usize> {
    ["SOSX_THREADS", "TOOL_THREADS"]
        .iter()
        .find_map(|k| std::env::var(k).ok())
        .and_then(|v| v.trim().parse().ok())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = thread_cap() {
        set_thread_cap(t);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seeds = vec![seed];
    }
    Ok(cfg)
}

fn out_path(common: &Common, cfg: &ExperimentConfig) -> Option<PathBuf> {
    common.out.clone().or_else(|| cfg.output.clone())
}

fn out_dir(common: &Common, cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = out_path(common, cfg).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Generate(c) => generate(&c),
        Command::Solve(c) => solve(&c),
        Command::Round(c) => round(&c),
        Command::Verify(v) => verify(&v),
        Command::Bench(c) => bench(&c),
    }
}

fn generate(c: &Common) -> Result<u8, Failure> {
    let cfg = load(c)?;
    let dir = out_dir(c, &cfg)?;
    for &seed in &cfg.seeds {
        let inst = build_instance(&cfg.graph, seed).with_context(|| format!("seed {seed}"))?;
        let rec = inst.record(cfg.relaxation_eps());
        write(&dir.join(format!("instance-{seed}.json")), &serde_json::to_string_pretty(&rec).context("encoding")?)?;
        write(&dir.join(format!("instance-{seed}.edges")), &write_edge_list(&inst.graph))?;
        println!(
            "seed {seed}: n {} m {} lambda2 {} planted {}",
            inst.graph.n(),
            inst.graph.m(),
            fmt_sig(inst.lambda2),
            inst.planted.as_ref().map_or(0, Vec::len)
        );
    }
    Ok(0)
}

fn solve(c: &Common) -> Result<u8, Failure> {
    let cfg = load(c)?;
    let dir = out_dir(c, &cfg)?;
    let results = map_slice(Exec::Auto, &cfg.seeds, |&seed| {
        build_instance(&cfg.graph, seed).and_then(|inst| solve_instance(&cfg, &inst))
    });
    let mut code = 0;
    for (&seed, res) in cfg.seeds.iter().zip(results) {
        let pd = res.with_context(|| format!("seed {seed}"))?;
        let r = &pd.residuals;
        write(&dir.join(format!("pd-{seed}.json")), &pd.to_json().context("encoding")?)?;
        println!(
            "seed {seed}: iterations {} converged {} objective {} affine {} min_eig {}",
            r.iterations,
            r.converged,
            r.objective.map_or_else(|| "-".into(), fmt_sig),
            fmt_sig(r.affine),
            fmt_sig(r.min_eigenvalue)
        );
        if !r.converged || r.infeasible {
            code = EXIT_NONCONVERGED;
        }
    }
    Ok(code)
}

fn summary(rep: &RoundingReport, lambda2: Option<f64>) -> String {
    let pots: Vec<String> = rep.potentials.iter().map(|(k, v)| format!("{k}={}", fmt_sig(*v))).collect();
    format!(
        "{} n {} lambda2 {} raw {} repaired {} [{}]",
        rep.algorithm,
        rep.n,
        lambda2.map_or_else(|| "-".into(), fmt_sig),
        rep.raw_size,
        rep.repaired_size,
        pots.join(" ")
    )
}

fn round(c: &Common) -> Result<u8, Failure> {
    let cfg = load(c)?;
    let dir = out_dir(c, &cfg)?;
    let mut code = 0;
    for (row, rep) in run_sweep(&cfg, Exec::Auto) {
        match rep {
            Some(rep) => {
                let path = dir.join(format!("round-{}-{}.json", row.seed, row.algorithm));
                write(&path, &rep.to_json().context("encoding")?)?;
                println!("seed {}: {}", row.seed, summary(&rep, row.lambda2));
            }
            None => warn!("seed {} {}: {}", row.seed, row.algorithm, row.flags.join("; ")),
        }
        if row.unconverged() {
            code = EXIT_NONCONVERGED;
        }
    }
    Ok(code)
}

fn verify(v: &VerifyArgs) -> Result<u8, Failure> {
    let cfg = load(&v.common)?;
    let tasks = match &v.lemma {
        Some(name) => {
            let mut task = VerifyTask::from_name(name).map_err(|e| Failure::Config(format!("--lemma: {e}")))?;
            if let (Some(eps), VerifyTask::ClusteringIs { eps: e, .. } | VerifyTask::ClusteringColoring { eps: e }) =
                (cfg.eps, &mut task)
            {
                *e = eps;
            }
            vec![task]
        }
        None if cfg.verify.is_empty() => {
            return Err(ConfigError { pointer: "/verify".into(), message: "no lemma configured".into() }.into())
        }
        None => cfg.verify.clone(),
    };
    let mut code = 0;
    let mut outcomes = Vec::new();
    for &seed in &cfg.seeds {
        for task in &tasks {
            let o = run_verify(&cfg, task, seed, Exec::Auto).with_context(|| format!("seed {seed}"))?;
            println!("seed {seed}: {}: {}", o.lemma, o.summary);
            if o.counterexample {
                warn!("counterexample for {} at seed {seed}", o.lemma);
                code = EXIT_COUNTEREXAMPLE;
            }
            outcomes.push(serde_json::json!({ "seed": seed, "outcome": o }));
        }
    }
    if let Some(path) = out_path(&v.common, &cfg) {
        write(&path, &serde_json::to_string_pretty(&outcomes).context("encoding")?)?;
    }
    Ok(code)
}

fn bench(c: &Common) -> Result<u8, Failure> {
    let cfg = load(c)?;
    let sweep = run_sweep(&cfg, Exec::Auto);
    let rows: Vec<_> = sweep.into_iter().map(|(r, _)| r).collect();
    for r in rows.iter().filter(|r| r.failed()) {
        warn!("seed {} {}: {}", r.seed, r.algorithm, r.flags.join("; "));
    }
    match out_path(c, &cfg) {
        Some(path) => {
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&rows, file).context("writing rows")?;
            // repaired sets, one JSON line per row, for re-verification
            let mut sets = String::new();
            for r in &rows {
                sets.push_str(&serde_json::json!({"seed": r.seed, "algorithm": r.algorithm, "set": r.repaired_set}).to_string());
                sets.push('\n');
            }
            write(&path.with_extension("sets.jsonl"), &sets)?;
            info!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&rows, stdout.lock()).context("writing rows")?;
            stdout.lock().flush().ok();
        }
    }
    Ok(if rows.iter().any(|r| r.unconverged()) { EXIT_NONCONVERGED } else { 0 })
}
