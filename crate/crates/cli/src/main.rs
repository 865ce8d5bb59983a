use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use tdqmc_core::experiments::{
    compare_outputs, reprofile_exact, reprofile_tdqmc, run_exact_pipeline, run_selftest, run_tdqmc_pipeline, schema_help,
    write_exact_outputs, write_tdqmc_outputs, ExperimentConfig, ProfileRecord, RawConfig,
};
use tdqmc_core::io::write_atomic;
use tdqmc_core::Error;

/// Exact and TDQMC marginal-wave entanglement profiles of 1D two-electron systems.
#[derive(Debug, Parser)]
#[command(name = "tdqmc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config file (flat `key = value` with [sections]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Root seed; overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Progress on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the two-body problem and profile its conditional waves.
    Exact,
    /// Run TDQMC to convergence and profile its guide waves.
    Tdqmc,
    /// Recompute profiles from cached states with the current strip layout.
    Profile,
    /// Compare the cached pipeline records.
    Compare,
    /// Run the fast invariant checks.
    Selftest,
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut raw = match &cli.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    raw.apply_env(std::env::vars())?;
    if let Some(s) = cli.seed {
        raw.set("run.seed", &s.to_string())?;
    }
    if let Some(o) = &cli.out {
        raw.set("output.dir", &o.display().to_string())?;
    }
    ExperimentConfig::from_raw(raw)
}

fn summary(rec: &ProfileRecord) -> String {
    format!(
        "{} {} {}: E = {:.6}, global S = {:.5}, {} walkers ({} outside strips)",
        rec.source.name(),
        rec.preset,
        rec.spin,
        rec.energy,
        rec.profile.global.entropy,
        rec.walkers,
        rec.profile.out_of_range
    )
}

fn write_resolved(dir: &Path, cfg: &ExperimentConfig) -> Result<(), Error> {
    let text = format!("# config_sha256={}\n{}", cfg.hash(), cfg.raw.canonical(false));
    write_atomic(&dir.join("config_resolved.cfg"), text.as_bytes())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Validation(format!("--threads: {e}")))?;
    }
    if let Command::Selftest = cli.command {
        let checks = run_selftest();
        let mut ok = true;
        let mut out = std::io::stdout().lock();
        for c in &checks {
            let _ = writeln!(out, "{} {:<24} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            ok &= c.passed;
        }
        return if ok {
            Ok(())
        } else {
            Err(Failure::Numerical("selftest failed".into()))
        };
    }
    let cfg = resolve_config(cli)?;
    let dir = cfg.output_dir.clone();
    let t0 = Instant::now();
    let log = |msg: &str| {
        if cli.verbose > 0 {
            eprintln!("[{:7.1}s] {msg}", t0.elapsed().as_secs_f64());
        }
    };
    log(&format!("config {}", cfg.hash()));
    match cli.command {
        Command::Exact => {
            log("solving the two-body problem");
            let out = run_exact_pipeline(&cfg)?;
            write_exact_outputs(&dir, &cfg, &out)?;
            write_resolved(&dir, &cfg)?;
            println!("{}", summary(&out.record));
        }
        Command::Tdqmc => {
            log("running TDQMC");
            let out = run_tdqmc_pipeline(&cfg)?;
            write_tdqmc_outputs(&dir, &cfg, &out)?;
            write_resolved(&dir, &cfg)?;
            println!("{} ({} steps)", summary(&out.record), out.state.steps);
        }
        Command::Profile => {
            if cfg.pipelines.exact() {
                println!("{}", summary(&reprofile_exact(&dir, &cfg)?));
            }
            if cfg.pipelines.tdqmc() {
                println!("{}", summary(&reprofile_tdqmc(&dir, &cfg)?));
            }
        }
        Command::Compare => {
            let r = compare_outputs(&dir, &cfg)?;
            let g = &r.global_entropies;
            let show = |v: Option<f64>| v.map(|x| format!("{x:.5}")).unwrap_or_else(|| "absent".into());
            println!(
                "global S: exact svd {}, exact conditional {}, tdqmc {}",
                show(g.exact_svd),
                show(g.exact_conditional),
                show(g.tdqmc_ensemble)
            );
            for (name, s) in [("exact", &r.exact), ("tdqmc", &r.tdqmc)] {
                if let Some(s) = s {
                    println!(
                        "{name}: corr(sigma, S) {}, peak strip {:?}, central strip {}",
                        show(s.sigma_entropy_correlation),
                        s.peak_strip,
                        r.central_strip
                    );
                }
            }
        }
        Command::Selftest => unreachable!(),
    }
    log("done");
    Ok(())
}

fn main() -> ExitCode {
    let cmd = Cli::command().after_long_help(schema_help());
    let cli = match Cli::from_arg_matches(&cmd.get_matches()) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}
