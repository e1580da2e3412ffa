//! `polarforge` command-line front end.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a configuration
//! error. Configuration errors are detected before any output file is
//! written.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polarforge::construction::{
    bhattacharyya_vector, levels_of, reliability_order, MotherCodeParams,
};
use polarforge::puncturing::{mother_length, plan_for, PatternKind};
use polarforge::simkit::{run_sweep, ChannelParams};
use polarforge::spectra::{compare_patterns, exhaustive_search, spectra_csv_string};
use thiserror::Error;

use config::{RunConfig, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(e: polarforge::Error) -> Self {
        CliError::Config(e.to_string())
    }

    fn runtime(e: polarforge::Error) -> Self {
        CliError::Runtime(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polarforge", version, about = "Rate-compatible polar coding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Bhattacharyya values and the reliability order of a mother code.
    Construct(ConstructArgs),
    /// Write a puncture pattern file.
    Puncture(PunctureArgs),
    /// Rank puncture patterns by their polar spectra.
    Spectra(SpectraArgs),
    /// Run a Monte Carlo BER/FER sweep.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// Number of polarization levels.
    #[arg(long, conflicts_with = "n")]
    l: Option<u32>,
    /// Mother code length (power of two).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    z0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PunctureArgs {
    /// Mother code length; defaults to the next power of two of `--nprime`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "nprime")]
    n_prime: usize,
    #[arg(long, default_value = "pd")]
    method: String,
    #[arg(long, default_value_t = 0.5)]
    z0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectraArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "nprime")]
    n_prime: usize,
    /// Comma-separated pattern kinds.
    #[arg(long, default_value = "pd,rqup,cw")]
    methods: String,
    #[arg(long, default_value_t = 0.5)]
    z0: f64,
    /// Also scan every pattern of this size and report the best SDC.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long = "nprime")]
    n_prime: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated pattern kinds.
    #[arg(long)]
    patterns: Option<String>,
    /// sc, scl or ca-scl.
    #[arg(long)]
    decoder: Option<String>,
    /// One list size or a comma-separated list.
    #[arg(long = "list-size")]
    list_size: Option<String>,
    #[arg(long)]
    crc: Option<String>,
    #[arg(long = "prune-threshold")]
    prune_threshold: Option<String>,
    #[arg(long = "llr-rule")]
    llr_rule: Option<String>,
    #[arg(long)]
    z0: Option<String>,
    /// `a,b,c` or `lo:step:hi` in dB.
    #[arg(long)]
    ebn0: Option<String>,
    #[arg(long = "max-frames")]
    max_frames: Option<String>,
    #[arg(long = "min-frame-errors")]
    min_frame_errors: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polarforge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Puncture(a) => puncture(a),
        Command::Spectra(a) => spectra(a),
        Command::Simulate(a) => simulate(a),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("POLARFORGE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Config(format!("POLARFORGE_THREADS must be a positive integer, got {value:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn construct(a: ConstructArgs) -> Result<(), CliError> {
    let levels = match (a.l, a.n) {
        (Some(l), None) => l,
        (None, Some(n)) => levels_of(n).map_err(CliError::config)?,
        _ => return Err(CliError::Config("give exactly one of --l and --n".into())),
    };
    if levels == 0 {
        return Err(CliError::Config("--l must be at least 1".into()));
    }
    let params = MotherCodeParams::new(levels, a.z0).map_err(CliError::config)?;
    let b = bhattacharyya_vector(params);
    let order = reliability_order(&b);
    let mut text = String::new();
    writeln!(text, "b: {}", join(b.values())).unwrap();
    writeln!(text, "a: {}", join(order.sorted_values())).unwrap();
    writeln!(text, "k: {}", join(order.indices())).unwrap();
    emit(&text, a.out.as_deref())
}

fn check_mother(n: Option<usize>, n_prime: usize) -> Result<usize, CliError> {
    let mother = mother_length(n_prime).map_err(CliError::config)?;
    match n {
        Some(n) if n != mother => Err(CliError::Config(format!(
            "n' = {n_prime} needs mother length {mother}, got --n {n}"
        ))),
        _ => Ok(mother),
    }
}

fn puncture(a: PunctureArgs) -> Result<(), CliError> {
    let n = check_mother(a.n, a.n_prime)?;
    let kind: PatternKind = a.method.parse().map_err(CliError::config)?;
    let params = MotherCodeParams::for_length(n, a.z0).map_err(CliError::config)?;
    let order = reliability_order(&bhattacharyya_vector(params));
    let pattern = kind.build(&order, a.n_prime).map_err(CliError::config)?;
    emit(&pattern.to_text(), a.out.as_deref())
}

fn spectra(a: SpectraArgs) -> Result<(), CliError> {
    let n = check_mother(a.n, a.n_prime)?;
    let kinds = a
        .methods
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<PatternKind>().map_err(CliError::config))
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(CliError::Config("--methods must name at least one pattern".into()));
    }
    let levels = levels_of(n).map_err(CliError::config)?;
    let params = MotherCodeParams::for_length(n, a.z0).map_err(CliError::config)?;
    let order = reliability_order(&bhattacharyya_vector(params));
    let named = kinds
        .iter()
        .map(|k| Ok((k.name().to_owned(), k.build(&order, a.n_prime).map_err(CliError::config)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = compare_patterns(levels, a.n_prime, &named).map_err(CliError::config)?;
    if a.exhaustive {
        for (name, pattern) in &named {
            let rep = exhaustive_search(pattern).map_err(CliError::config)?;
            eprintln!(
                "exhaustive: {name} zero weight {} vs best {} over {} patterns (gap {}, {} maximisers)",
                rep.candidate_zero_weight,
                rep.best_zero_weight,
                rep.patterns_checked,
                rep.gap,
                rep.best_count
            );
        }
    }
    let text = spectra_csv_string(&rows).map_err(CliError::runtime)?;
    emit(&text, a.out.as_deref())
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let mut settings = match &a.config {
        Some(path) => Settings::read(path)?,
        None => Settings::default(),
    };
    let overrides = [
        ("scenario", a.scenario),
        ("n_prime", a.n_prime),
        ("k", a.k),
        ("patterns", a.patterns),
        ("decoder", a.decoder),
        ("list_size", a.list_size),
        ("crc", a.crc),
        ("prune_threshold", a.prune_threshold),
        ("llr_rule", a.llr_rule),
        ("z0", a.z0),
        ("ebn0", a.ebn0),
        ("max_frames", a.max_frames),
        ("min_frame_errors", a.min_frame_errors),
        ("seed", a.seed),
        ("out", a.out.map(|p| p.to_string_lossy().into_owned())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            settings.set(key, &v)?;
        }
    }
    let cfg = RunConfig::resolve(&settings, rand::random())?;
    validate_run(&cfg)?;
    if !cfg.seed_was_given {
        eprintln!("seed: {} (generated)", cfg.budget.master_seed);
    }

    let s = &cfg.scenario;
    eprintln!(
        "simulate {}: n'={} k={} patterns={} decoders={} points={}",
        s.name,
        s.n_prime,
        s.k,
        s.patterns.len(),
        s.decoders.len(),
        s.ebn0_db.len()
    );
    let result = run_sweep(s, &cfg.base, &cfg.budget, |r| {
        eprintln!(
            "{} {} L={} {} {:.2} dB: frames={} fe={} ber={:.3e} fer={:.3e}",
            r.pattern, r.decoder, r.list_size, r.crc, r.ebn0_db, r.frames, r.frame_errors, r.ber, r.fer
        );
    })
    .map_err(CliError::runtime)?;
    let text = result.to_csv_string().map_err(CliError::runtime)?;
    emit(&text, cfg.out.as_deref())
}

/// Checks every code plan and channel point the sweep will need.
fn validate_run(cfg: &RunConfig) -> Result<(), CliError> {
    let s = &cfg.scenario;
    if s.k > s.n_prime {
        return Err(CliError::Config(format!("k = {} exceeds n' = {}", s.k, s.n_prime)));
    }
    let rate = s.k as f64 / s.n_prime as f64;
    for &e in &s.ebn0_db {
        ChannelParams::new(e, rate).map_err(CliError::config)?;
    }
    for &p in &s.patterns {
        for d in &s.decoders {
            plan_for(p, s.n_prime, s.k + d.crc.len(), s.z0).map_err(CliError::config)?;
        }
    }
    if let Some(out) = &cfg.out {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !dir.is_dir() {
                return Err(CliError::Config(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
        }
    }
    Ok(())
}
