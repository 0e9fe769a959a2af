//! Command-line driver for the disorder-sweep experiments.
//!
//! Subcommands: `merit` (figure-of-merit sweep, network and/or exact
//! method), `entangle` (post-quench entropy growth), `oracle` (two-block
//! entropy against exact evolution). Options may also come from a flat
//! `key=value` config file; command-line flags override file entries, and
//! the `LIOMS_WORKERS` environment variable supplies a worker count when
//! no `--workers` flag is given.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lioms::{run_experiment, Error, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(
    name = "lioms",
    about = "Pseudo-spin quality and entanglement-growth experiments for disordered XXZ chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Figure-of-merit sweep over disorder strengths.
    ///
    /// Runs the tensor-network method when --block-legs is given, the
    /// exact-diagonalization method when --chain-sites is given, and both
    /// (merged into one output) when both are given.
    Merit(MeritArgs),
    /// Entanglement-entropy growth after a quench from the alternating state.
    Entangle(EntangleArgs),
    /// Two-block entropy versus exact evolution on a dense-sized chain.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Comma-separated disorder strengths, e.g. 8,12,16,20
    #[arg(long)]
    disorder: Option<String>,
    /// Disorder realizations per strength
    #[arg(long)]
    realizations: Option<u64>,
    /// Base seed for the counter-based field generator
    #[arg(long)]
    seed: Option<u64>,
    /// Anisotropy of the zz coupling
    #[arg(long)]
    delta: Option<f64>,
    /// Output directory for CSV (and optional SVG) files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to LIOMS_WORKERS or 1)
    #[arg(long)]
    workers: Option<usize>,
    /// Largest site count allowed for dense matrices
    #[arg(long)]
    dense_limit: Option<usize>,
    /// Also emit line-chart SVGs next to the aggregate CSVs
    #[arg(long)]
    svg: bool,
    /// Flat key=value config file; flags given here override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct MeritArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sites per first-layer block (window is twice this)
    #[arg(long)]
    block_legs: Option<usize>,
    /// Chain length for the exact-diagonalization method
    #[arg(long)]
    chain_sites: Option<usize>,
}

#[derive(Args)]
struct EntangleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sites per first-layer block (window is twice this)
    #[arg(long)]
    block_legs: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chain length; the window covers it with two equal blocks
    #[arg(long)]
    chain_sites: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
}

/// Values accepted from a key=value config file.
#[derive(Default)]
struct FileConfig {
    disorder: Option<Vec<f64>>,
    realizations: Option<u64>,
    seed: Option<u64>,
    j: Option<f64>,
    delta: Option<f64>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    dense_limit: Option<usize>,
    svg: Option<bool>,
    block_legs: Option<usize>,
    chain_sites: Option<usize>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    t_points: Option<usize>,
}

fn parse_disorder_list(s: &str) -> Result<Vec<f64>, Error> {
    let list: Result<Vec<f64>, _> = s
        .split(',')
        .map(|tok| tok.trim().parse::<f64>())
        .collect();
    list.map_err(|e| Error::Argument(format!("bad disorder list '{s}': {e}")))
}

fn parse_config_file(path: &PathBuf) -> Result<FileConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = FileConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Argument(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |e: String| {
            Error::Argument(format!("{}:{}: {e}", path.display(), lineno + 1))
        };
        macro_rules! parse_into {
            ($field:ident, $ty:ty) => {
                cfg.$field = Some(
                    value
                        .parse::<$ty>()
                        .map_err(|e| bad(format!("bad value for {key}: {e}")))?,
                )
            };
        }
        match key {
            "disorder" => cfg.disorder = Some(parse_disorder_list(value)?),
            "realizations" => parse_into!(realizations, u64),
            "seed" => parse_into!(seed, u64),
            "j" => parse_into!(j, f64),
            "delta" => parse_into!(delta, f64),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "workers" => parse_into!(workers, usize),
            "dense_limit" => parse_into!(dense_limit, usize),
            "svg" => parse_into!(svg, bool),
            "block_legs" => parse_into!(block_legs, usize),
            "chain_sites" => parse_into!(chain_sites, usize),
            "t_min" => parse_into!(t_min, f64),
            "t_max" => parse_into!(t_max, f64),
            "t_points" => parse_into!(t_points, usize),
            other => {
                return Err(bad(format!("unknown config key '{other}'")));
            }
        }
    }
    Ok(cfg)
}

fn workers_from_env() -> Option<usize> {
    std::env::var("LIOMS_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
}

fn build_config(mode: Mode, common: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let file = match &common.config {
        Some(path) => parse_config_file(path)?,
        None => FileConfig::default(),
    };
    let out = common
        .out
        .clone()
        .or(file.out)
        .ok_or_else(|| Error::Argument("an output directory is required (--out)".to_string()))?;
    let mut cfg = ExperimentConfig::new(mode, out);
    if let Some(j) = file.j {
        cfg.coupling_j = j;
    }
    if let Some(d) = common.delta.or(file.delta) {
        cfg.anisotropy_delta = d;
    }
    if let Some(list) = &common.disorder {
        cfg.w_list = parse_disorder_list(list)?;
    } else if let Some(list) = file.disorder {
        cfg.w_list = list;
    }
    if let Some(r) = common.realizations.or(file.realizations) {
        cfg.realizations = r;
    }
    if let Some(s) = common.seed.or(file.seed) {
        cfg.seed = s;
    }
    if let Some(d) = common.dense_limit.or(file.dense_limit) {
        cfg.dense_limit = d;
    }
    cfg.workers = common
        .workers
        .or_else(workers_from_env)
        .or(file.workers)
        .unwrap_or(1);
    cfg.emit_svg = common.svg || file.svg.unwrap_or(false);
    cfg.block_legs = file.block_legs;
    cfg.chain_sites = file.chain_sites;
    cfg.t_min = file.t_min.unwrap_or(cfg.t_min);
    cfg.t_max = file.t_max.unwrap_or(cfg.t_max);
    cfg.t_points = file.t_points.unwrap_or(cfg.t_points);
    Ok(cfg)
}

fn run() -> Result<Vec<PathBuf>, Error> {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Command::Merit(args) => {
            let block = args.block_legs;
            let chain = args.chain_sites;
            // Mode depends on which size flags are present (CLI or file).
            let mut cfg = build_config(Mode::MeritBoth, &args.common)?;
            if let Some(b) = block {
                cfg.block_legs = Some(b);
            }
            if let Some(n) = chain {
                cfg.chain_sites = Some(n);
            }
            cfg.mode = match (cfg.block_legs, cfg.chain_sites) {
                (Some(_), Some(_)) => Mode::MeritBoth,
                (Some(_), None) => Mode::MeritTnm,
                (None, Some(_)) => Mode::MeritEdm,
                (None, None) => {
                    return Err(Error::Argument(
                        "merit needs --block-legs and/or --chain-sites".to_string(),
                    ))
                }
            };
            cfg
        }
        Command::Entangle(args) => {
            let mut cfg = build_config(Mode::Entangle, &args.common)?;
            if let Some(b) = args.block_legs {
                cfg.block_legs = Some(b);
            }
            if let Some(t) = args.t_min {
                cfg.t_min = t;
            }
            if let Some(t) = args.t_max {
                cfg.t_max = t;
            }
            if let Some(n) = args.t_points {
                cfg.t_points = n;
            }
            cfg
        }
        Command::Oracle(args) => {
            let mut cfg = build_config(Mode::OracleCompare, &args.common)?;
            if let Some(n) = args.chain_sites {
                cfg.chain_sites = Some(n);
            }
            if let Some(t) = args.t_min {
                cfg.t_min = t;
            }
            if let Some(t) = args.t_max {
                cfg.t_max = t;
            }
            if let Some(n) = args.t_points {
                cfg.t_points = n;
            }
            cfg
        }
    };
    run_experiment(&cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            let code = match e {
                Error::Argument(_) => 2,
                Error::Capacity(_) => 3,
                Error::Contract(_) => 4,
                Error::Io(_) => 5,
            };
            ExitCode::from(code)
        }
    }
}
