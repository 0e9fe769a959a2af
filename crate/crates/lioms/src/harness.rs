//! Disorder-sweep experiments: configuration, realization orchestration,
//! aggregation, and deterministic CSV/SVG emission.
//!
//! Every cell of every output is a pure function of
//! `(seed, realization, disorder)`, tasks are mapped in a canonical order,
//! and floats are serialized with 17 significant digits, so reruns and
//! different worker counts produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::chain::ChainSpec;
use crate::entangle::{tn_entropy_trace, TimeGrid};
use crate::error::{Error, Result};
use crate::exact::exact_entropy_trace;
use crate::merit::{merit_split, MeritReport};
use crate::network::{tn_liom_from_net, TwoLayerUnitary, WindowLayout};
use crate::ops::{DenseOperator, OperatorKind};
use crate::svg::{line_chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Figure of merit for window pseudo-spins from the two-layer network.
    MeritTnm,
    /// Figure of merit for exact pseudo-spins of an isolated short chain.
    MeritEdm,
    /// Both merit methods in one merged output, for side-by-side sweeps.
    MeritBoth,
    /// Entropy growth after a quench, two-block reduction.
    Entangle,
    /// Exact-evolution versus two-block entropies on a dense-sized chain.
    OracleCompare,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub coupling_j: f64,
    pub anisotropy_delta: f64,
    pub w_list: Vec<f64>,
    pub block_legs: Option<usize>,
    pub chain_sites: Option<usize>,
    pub realizations: u64,
    pub seed: u64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub out_dir: PathBuf,
    pub dense_limit: usize,
    pub workers: usize,
    pub emit_svg: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            mode,
            coupling_j: 1.0,
            anisotropy_delta: 1.0,
            w_list: vec![8.0, 12.0, 16.0, 20.0],
            block_legs: None,
            chain_sites: None,
            realizations: 100,
            seed: 42,
            t_min: 1e-1,
            t_max: 1e6,
            t_points: 48,
            out_dir: out_dir.into(),
            dense_limit: crate::exact::DEFAULT_DENSE_LIMIT,
            workers: 1,
            emit_svg: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::Argument("need at least one realization".to_string()));
        }
        if self.w_list.is_empty() {
            return Err(Error::Argument("disorder list must not be empty".to_string()));
        }
        if !self.w_list.iter().all(|w| w.is_finite() && *w >= 0.0) {
            return Err(Error::Argument(
                "disorder strengths must be finite and nonnegative".to_string(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::Argument("worker count must be positive".to_string()));
        }
        if !(self.t_min < self.t_max) {
            return Err(Error::Argument(format!(
                "need t_min < t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if let Some(b) = self.block_legs {
            if b < 2 || b % 2 != 0 {
                return Err(Error::Argument(format!(
                    "block legs must be even and at least 2, got {b}"
                )));
            }
        }
        if let Some(n) = self.chain_sites {
            if n < 2 {
                return Err(Error::Argument(format!(
                    "chain needs at least 2 sites, got {n}"
                )));
            }
        }
        match self.mode {
            Mode::MeritTnm => {
                self.require_block()?;
            }
            Mode::MeritEdm => {
                self.require_chain()?;
            }
            Mode::MeritBoth => {
                self.require_block()?;
                self.require_chain()?;
            }
            Mode::Entangle => {
                self.require_block()?;
            }
            Mode::OracleCompare => {
                let n = self.require_chain()?;
                if n % 4 != 0 {
                    return Err(Error::Argument(format!(
                        "oracle comparison covers the chain with two equal even blocks; \
                         chain sites must be a multiple of 4, got {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn require_block(&self) -> Result<usize> {
        self.block_legs
            .ok_or_else(|| Error::Argument("this mode needs block legs".to_string()))
    }

    fn require_chain(&self) -> Result<usize> {
        self.chain_sites
            .ok_or_else(|| Error::Argument("this mode needs a chain size".to_string()))
    }

    fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::log_spaced(self.t_min, self.t_max, self.t_points)
    }
}

/// Mean, standard error, and count over one aggregation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub mean: f64,
    pub sem: f64,
    pub count: usize,
}

/// Mean and standard error of the mean (sample standard deviation over
/// `sqrt(n)`); a single value has zero standard error.
pub fn aggregate_realizations(values: &[f64]) -> Result<AggregateStats> {
    if values.is_empty() {
        return Err(Error::Argument("cannot aggregate an empty cell".to_string()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sem = if n > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(AggregateStats {
        mean,
        sem,
        count: n,
    })
}

/// 17-significant-digit float serialization shared by every output file.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Map `f` over tasks, preserving task order in the result.
#[cfg(feature = "parallel")]
pub fn map_tasks<T, R, F>(tasks: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    if workers <= 1 {
        return map_tasks_serial(tasks, f);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Argument(format!("cannot build worker pool: {e}")))?;
    pool.install(|| {
        use rayon::prelude::*;
        tasks.par_iter().map(&f).collect::<Result<Vec<R>>>()
    })
}

#[cfg(not(feature = "parallel"))]
pub fn map_tasks<T, R, F>(tasks: &[T], _workers: usize, f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    map_tasks_serial(tasks, f)
}

/// Sequential fallback; the parallel map must agree with this bit for bit.
pub fn map_tasks_serial<T, R, F>(tasks: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    tasks.iter().map(f).collect()
}

/// Run the configured experiment; returns the paths written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    match cfg.mode {
        Mode::MeritTnm | Mode::MeritEdm | Mode::MeritBoth => run_merit_experiment(cfg),
        Mode::Entangle => run_entropy_experiment(cfg),
        Mode::OracleCompare => run_oracle_compare(cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MeritMethod {
    Tnm,
    Edm,
}

impl MeritMethod {
    fn name(self) -> &'static str {
        match self {
            MeritMethod::Tnm => "tnm",
            MeritMethod::Edm => "edm",
        }
    }
}

/// One window pseudo-spin merit evaluation. The evaluation chain is padded
/// by one exterior site on each side so both window edges carry a crossing
/// bond, matching the infinite-chain reading of the boundary split.
pub fn tnm_merit_one(
    seed: u64,
    realization: u64,
    block_legs: usize,
    coupling_j: f64,
    anisotropy_delta: f64,
    w: f64,
    dense_limit: usize,
) -> Result<MeritReport> {
    let n_sites = 2 * block_legs + 2;
    let spec = ChainSpec::sampled(seed, realization, n_sites, coupling_j, anisotropy_delta, w)?;
    let layout = WindowLayout::new(block_legs, 2)?;
    let net = TwoLayerUnitary::build(&spec, &layout, dense_limit)?;
    let site = layout.center_site();
    let tau = tn_liom_from_net(&net, site, dense_limit)?;
    merit_split(&tau, &spec, site, block_legs, realization)
}

/// One exact-pseudo-spin merit evaluation for an isolated short chain,
/// likewise padded so the boundary split sees both crossing bonds. The
/// interior part vanishes identically by construction.
pub fn edm_merit_one(
    seed: u64,
    realization: u64,
    chain_sites: usize,
    coupling_j: f64,
    anisotropy_delta: f64,
    w: f64,
    dense_limit: usize,
) -> Result<MeritReport> {
    let n_sites = chain_sites + 2;
    let spec = ChainSpec::sampled(seed, realization, n_sites, coupling_j, anisotropy_delta, w)?;
    let window = crate::chain::SiteRange::new(2, chain_sites + 1)?;
    let sub = spec.sub_spec(&window)?;
    let center_local = chain_sites.div_ceil(2);
    let tau_local = crate::exact::exact_liom(&sub, center_local, dense_limit)?;
    let tau = DenseOperator::from_parts(
        window,
        tau_local.matrix().clone(),
        OperatorKind::Hermitian,
    );
    merit_split(&tau, &spec, 1 + center_local, chain_sites, realization)
}

fn run_merit_experiment(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let methods: Vec<MeritMethod> = match cfg.mode {
        Mode::MeritTnm => vec![MeritMethod::Tnm],
        Mode::MeritEdm => vec![MeritMethod::Edm],
        Mode::MeritBoth => vec![MeritMethod::Tnm, MeritMethod::Edm],
        _ => unreachable!("merit runner called for a merit mode"),
    };

    let mut tasks = Vec::new();
    for &method in &methods {
        for &w in &cfg.w_list {
            for r in 0..cfg.realizations {
                tasks.push((method, w, r));
            }
        }
    }
    let reports = map_tasks(&tasks, cfg.workers, |&(method, w, r)| {
        let rep = match method {
            MeritMethod::Tnm => tnm_merit_one(
                cfg.seed,
                r,
                cfg.block_legs.expect("validated"),
                cfg.coupling_j,
                cfg.anisotropy_delta,
                w,
                cfg.dense_limit,
            ),
            MeritMethod::Edm => edm_merit_one(
                cfg.seed,
                r,
                cfg.chain_sites.expect("validated"),
                cfg.coupling_j,
                cfg.anisotropy_delta,
                w,
                cfg.dense_limit,
            ),
        };
        rep.map(|rep| (method, rep))
            .map_err(|e| annotate(e, method.name(), w, r))
    })?;

    let mut raw = String::from(
        "method,size_param,disorder_w,realization,site,delta_total,delta_1,delta_2,seed\n",
    );
    for (method, rep) in &reports {
        writeln!(
            raw,
            "{},{},{},{},{},{},{},{},{}",
            method.name(),
            rep.size_param,
            fmt_float(rep.disorder_w),
            rep.realization,
            rep.site,
            fmt_float(rep.delta_total),
            fmt_float(rep.delta_interior),
            fmt_float(rep.delta_boundary),
            cfg.seed
        )
        .expect("string write");
    }

    let mut agg = String::from(
        "method,size_param,disorder_w,site,delta_total_mean,delta_total_sem,\
         delta_1_mean,delta_1_sem,delta_2_mean,delta_2_sem,n\n",
    );
    let mut chart_series: Vec<Series> = Vec::new();
    for &method in &methods {
        let mut points = Vec::new();
        for &w in &cfg.w_list {
            let cell: Vec<&MeritReport> = reports
                .iter()
                .filter(|(m, rep)| *m == method && rep.disorder_w == w)
                .map(|(_, rep)| rep)
                .collect();
            if cell.is_empty() {
                continue;
            }
            let total =
                aggregate_realizations(&cell.iter().map(|r| r.delta_total).collect::<Vec<_>>())?;
            let interior =
                aggregate_realizations(&cell.iter().map(|r| r.delta_interior).collect::<Vec<_>>())?;
            let boundary =
                aggregate_realizations(&cell.iter().map(|r| r.delta_boundary).collect::<Vec<_>>())?;
            writeln!(
                agg,
                "{},{},{},{},{},{},{},{},{},{},{}",
                method.name(),
                cell[0].size_param,
                fmt_float(w),
                cell[0].site,
                fmt_float(total.mean),
                fmt_float(total.sem),
                fmt_float(interior.mean),
                fmt_float(interior.sem),
                fmt_float(boundary.mean),
                fmt_float(boundary.sem),
                total.count
            )
            .expect("string write");
            points.push((w, total.mean));
        }
        chart_series.push(Series {
            label: method.name().to_string(),
            points,
        });
    }

    let mut written = vec![
        write_file(&cfg.out_dir, "merit_raw.csv", &raw)?,
        write_file(&cfg.out_dir, "merit_agg.csv", &agg)?,
    ];
    if cfg.emit_svg {
        let svg = line_chart(
            "figure of merit vs disorder",
            "W",
            "mean delta",
            &chart_series,
        );
        written.push(write_file(&cfg.out_dir, "merit_vs_w.svg", &svg)?);
    }
    Ok(written)
}

fn run_entropy_experiment(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let b = cfg.block_legs.expect("validated");
    let grid = cfg.grid()?;

    let mut tasks = Vec::new();
    for &w in &cfg.w_list {
        for r in 0..cfg.realizations {
            tasks.push((w, r));
        }
    }
    let traces = map_tasks(&tasks, cfg.workers, |&(w, r)| {
        let spec = ChainSpec::sampled(
            cfg.seed,
            r,
            2 * b,
            cfg.coupling_j,
            cfg.anisotropy_delta,
            w,
        )?;
        let layout = WindowLayout::new(b, 1)?;
        tn_entropy_trace(&spec, &layout, &grid, cfg.dense_limit, cfg.seed, r)
            .map_err(|e| annotate(e, "entangle", w, r))
    })?;

    let mut raw = String::from("block_legs,disorder_w,realization,time,entropy,seed\n");
    for trace in &traces {
        for (t, s) in trace.grid.points().iter().zip(trace.entropy.iter()) {
            writeln!(
                raw,
                "{},{},{},{},{},{}",
                trace.block_legs,
                fmt_float(trace.disorder_w),
                trace.realization,
                fmt_float(*t),
                fmt_float(*s),
                trace.seed
            )
            .expect("string write");
        }
    }

    let mut agg = String::from("block_legs,disorder_w,time,entropy_mean,entropy_sem,n\n");
    let mut charts = Vec::new();
    for &w in &cfg.w_list {
        let cell: Vec<_> = traces.iter().filter(|tr| tr.disorder_w == w).collect();
        if cell.is_empty() {
            continue;
        }
        let mut points = Vec::new();
        for (ti, t) in grid.points().iter().enumerate() {
            let values: Vec<f64> = cell.iter().map(|tr| tr.entropy[ti]).collect();
            let stats = aggregate_realizations(&values)?;
            writeln!(
                agg,
                "{},{},{},{},{},{}",
                b,
                fmt_float(w),
                fmt_float(*t),
                fmt_float(stats.mean),
                fmt_float(stats.sem),
                stats.count
            )
            .expect("string write");
            points.push((t.log10(), stats.mean));
        }
        charts.push((w, points));
    }

    let mut written = vec![
        write_file(&cfg.out_dir, "entropy_raw.csv", &raw)?,
        write_file(&cfg.out_dir, "entropy_agg.csv", &agg)?,
    ];
    if cfg.emit_svg {
        for (w, points) in charts {
            let svg = line_chart(
                &format!("entropy growth, W = {w}"),
                "log10 t",
                "mean S (nats)",
                &[Series {
                    label: format!("b = {b}"),
                    points,
                }],
            );
            written.push(write_file(&cfg.out_dir, &format!("entropy_w{w}.svg"), &svg)?);
        }
    }
    Ok(written)
}

fn run_oracle_compare(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let n = cfg.chain_sites.expect("validated");
    let b = n / 2;
    let grid = cfg.grid()?;

    let mut tasks = Vec::new();
    for &w in &cfg.w_list {
        for r in 0..cfg.realizations {
            tasks.push((w, r));
        }
    }
    let rows = map_tasks(&tasks, cfg.workers, |&(w, r)| {
        let spec = ChainSpec::sampled(cfg.seed, r, n, cfg.coupling_j, cfg.anisotropy_delta, w)?;
        let exact = exact_entropy_trace(&spec, b, grid.points(), cfg.dense_limit)
            .map_err(|e| annotate(e, "oracle/exact", w, r))?;
        let layout = WindowLayout::new(b, 1)?;
        let tn = tn_entropy_trace(&spec, &layout, &grid, cfg.dense_limit, cfg.seed, r)
            .map_err(|e| annotate(e, "oracle/network", w, r))?;
        Ok((w, r, exact, tn.entropy))
    })?;

    let mut raw = String::from(
        "chain_sites,block_legs,disorder_w,realization,time,s_exact,s_tn,abs_dev,seed\n",
    );
    for (w, r, exact, tn) in &rows {
        for ((t, se), st) in grid.points().iter().zip(exact.iter()).zip(tn.iter()) {
            writeln!(
                raw,
                "{},{},{},{},{},{},{},{},{}",
                n,
                b,
                fmt_float(*w),
                r,
                fmt_float(*t),
                fmt_float(*se),
                fmt_float(*st),
                fmt_float((se - st).abs()),
                cfg.seed
            )
            .expect("string write");
        }
    }

    let mut agg = String::from(
        "chain_sites,block_legs,disorder_w,time,s_exact_mean,s_tn_mean,abs_dev_mean,abs_dev_sem,n\n",
    );
    let mut charts = Vec::new();
    for &w in &cfg.w_list {
        let cell: Vec<_> = rows.iter().filter(|(rw, ..)| *rw == w).collect();
        if cell.is_empty() {
            continue;
        }
        let mut pts_exact = Vec::new();
        let mut pts_tn = Vec::new();
        for (ti, t) in grid.points().iter().enumerate() {
            let ex: Vec<f64> = cell.iter().map(|(_, _, e, _)| e[ti]).collect();
            let tn: Vec<f64> = cell.iter().map(|(_, _, _, s)| s[ti]).collect();
            let dev: Vec<f64> = cell
                .iter()
                .map(|(_, _, e, s)| (e[ti] - s[ti]).abs())
                .collect();
            let ex_stats = aggregate_realizations(&ex)?;
            let tn_stats = aggregate_realizations(&tn)?;
            let dev_stats = aggregate_realizations(&dev)?;
            writeln!(
                agg,
                "{},{},{},{},{},{},{},{},{}",
                n,
                b,
                fmt_float(w),
                fmt_float(*t),
                fmt_float(ex_stats.mean),
                fmt_float(tn_stats.mean),
                fmt_float(dev_stats.mean),
                fmt_float(dev_stats.sem),
                dev_stats.count
            )
            .expect("string write");
            pts_exact.push((t.log10(), ex_stats.mean));
            pts_tn.push((t.log10(), tn_stats.mean));
        }
        charts.push((w, pts_exact, pts_tn));
    }

    let mut written = vec![
        write_file(&cfg.out_dir, "oracle_raw.csv", &raw)?,
        write_file(&cfg.out_dir, "oracle_agg.csv", &agg)?,
    ];
    if cfg.emit_svg {
        for (w, pts_exact, pts_tn) in charts {
            let svg = line_chart(
                &format!("exact vs two-block entropy, W = {w}"),
                "log10 t",
                "mean S (nats)",
                &[
                    Series {
                        label: "exact".to_string(),
                        points: pts_exact,
                    },
                    Series {
                        label: "two-block".to_string(),
                        points: pts_tn,
                    },
                ],
            );
            written.push(write_file(&cfg.out_dir, &format!("oracle_w{w}.svg"), &svg)?);
        }
    }
    Ok(written)
}

fn annotate(e: Error, what: &str, w: f64, r: u64) -> Error {
    match e {
        Error::Argument(m) => Error::Argument(format!("{what} (W={w}, realization {r}): {m}")),
        Error::Capacity(m) => Error::Capacity(format!("{what} (W={w}, realization {r}): {m}")),
        Error::Contract(m) => Error::Contract(format!("{what} (W={w}, realization {r}): {m}")),
        Error::Io(m) => Error::Io(m),
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, content.as_bytes())?;
    Ok(path)
}
