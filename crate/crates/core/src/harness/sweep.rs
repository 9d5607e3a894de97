//! Round-trip-rate sweep over target acceptance rates.
//!
//! Each (mode, target) point builds its own ladder over `[beta_min, 1]`,
//! simulates it on a stream seeded from `(seed, point index)` and evaluates
//! the hitting-time oracle alongside. The point index depends only on the
//! grid position and the mode, so output does not depend on the worker
//! count, on scheduling, or on which other modes are in the same run.

use std::io::{Read, Write};

use rayon::prelude::*;

use super::{fmt_f64, linspace, validate_grid, worker_pool};
use crate::error::{Error, Result};
use crate::oracle::{round_trip_rate_nonreversible, round_trip_rate_reversible, EdgeAcceptances};
use crate::rng::derive_seed;
use crate::scaling::Mode;
use crate::tempering::{build_ladder, run, TemperConfig};

pub const MIN_ITERATIONS: u64 = 100_000;
pub const DEFAULT_ITERATIONS: u64 = 20_000_000;
pub const DEFAULT_GRID_POINTS: usize = 20;
pub const DEFAULT_GRID_RANGE: (f64, f64) = (0.05, 0.95);

pub const HEADER: [&str; 9] = [
    "mode",
    "target_acc",
    "empirical_acc",
    "n_levels",
    "round_trips",
    "iterations",
    "rate_per_million",
    "oracle_rate_per_million",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub d: usize,
    pub beta_min: f64,
    pub grid: Vec<f64>,
    pub iterations: u64,
    pub modes: Vec<Mode>,
    pub seed: u64,
    /// Worker threads; 0 lets rayon pick.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let (lo, hi) = DEFAULT_GRID_RANGE;
        Self {
            d: 100,
            beta_min: 0.1,
            grid: linspace(lo, hi, DEFAULT_GRID_POINTS),
            iterations: DEFAULT_ITERATIONS,
            modes: Mode::BOTH.to_vec(),
            seed: 0,
            workers: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.grid)?;
        if self.iterations < MIN_ITERATIONS {
            return Err(Error::invalid("iterations", self.iterations, "must be at least 100000"));
        }
        if self.d == 0 {
            return Err(Error::invalid("d", 0, "must be positive"));
        }
        if !(self.beta_min > 0.0 && self.beta_min < 1.0) {
            return Err(Error::invalid("beta_min", self.beta_min, "must lie in (0, 1)"));
        }
        if self.modes.is_empty() {
            return Err(Error::invalid("modes", "[]", "need at least one mode"));
        }
        Ok(())
    }
}

/// One CSV row. Fields a failed point could not produce are `None` and the
/// reason is in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mode: Mode,
    pub target_acc: f64,
    pub empirical_acc: Option<f64>,
    pub n_levels: Option<usize>,
    pub round_trips: Option<u64>,
    pub iterations: u64,
    pub rate_per_million: Option<f64>,
    pub oracle_rate_per_million: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    /// Poisson standard error of `rate_per_million`.
    pub fn rate_std_err_per_million(&self) -> Option<f64> {
        self.round_trips
            .map(|n| (n as f64).sqrt() / (self.iterations as f64 / 1e6))
    }
}

fn mode_code(mode: Mode) -> u64 {
    match mode {
        Mode::Reversible => 0,
        Mode::Nonreversible => 1,
    }
}

/// Seed of grid point `grid_index` for `mode`.
pub fn point_seed(seed: u64, grid_index: usize, mode: Mode) -> u64 {
    derive_seed(seed, 2 * grid_index as u64 + mode_code(mode))
}

/// Oracle rate for a freshly built ladder.
pub fn oracle_rate(d: usize, beta_min: f64, target_acc: f64, mode: Mode) -> Result<f64> {
    let ladder = build_ladder(beta_min, target_acc, d)?;
    let edges = EdgeAcceptances::for_ladder(&ladder, d)?;
    let rate = match mode {
        Mode::Reversible => round_trip_rate_reversible(&edges)?,
        Mode::Nonreversible => round_trip_rate_nonreversible(&edges)?,
    };
    Ok(rate.rate_per_million())
}

fn run_point(cfg: &SweepConfig, grid_index: usize, mode: Mode) -> SweepRow {
    let target_acc = cfg.grid[grid_index];
    let mut row = SweepRow {
        mode,
        target_acc,
        empirical_acc: None,
        n_levels: None,
        round_trips: None,
        iterations: cfg.iterations,
        rate_per_million: None,
        oracle_rate_per_million: None,
        error: None,
    };
    let ladder = match build_ladder(cfg.beta_min, target_acc, cfg.d) {
        Ok(l) => l,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.n_levels = Some(ladder.len());
    let sim = run(&TemperConfig {
        d: cfg.d,
        ladder,
        mode,
        iterations: cfg.iterations,
        seed: point_seed(cfg.seed, grid_index, mode),
    });
    let mut errors = Vec::new();
    match sim {
        Ok(s) => {
            row.empirical_acc = Some(s.empirical_acc);
            row.round_trips = Some(s.round_trips);
            row.rate_per_million = Some(s.rate_per_million);
        }
        Err(e) => errors.push(format!("simulation: {e}")),
    }
    match oracle_rate(cfg.d, cfg.beta_min, target_acc, mode) {
        Ok(r) => row.oracle_rate_per_million = Some(r),
        Err(e) => errors.push(format!("oracle: {e}")),
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Runs every (mode, grid point) pair. Rows come back grouped by mode in
/// the order of `cfg.modes`, each group in grid order. A failing point is
/// recorded in its row and does not stop the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, Mode)> = cfg
        .modes
        .iter()
        .flat_map(|&m| (0..cfg.grid.len()).map(move |i| (i, m)))
        .collect();
    let pool = worker_pool(cfg.workers)?;
    Ok(pool.install(|| jobs.par_iter().map(|&(i, m)| run_point(cfg, i, m)).collect()))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.mode.as_str().to_string(),
            fmt_f64(r.target_acc),
            opt_f64(r.empirical_acc),
            opt(r.n_levels),
            opt(r.round_trips),
            r.iterations.to_string(),
            opt_f64(r.rate_per_million),
            opt_f64(r.oracle_rate_per_million),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<'a>(rec: &'a csv::StringRecord, idx: &[usize; 9], col: usize) -> &'a str {
    rec.get(idx[col]).unwrap_or("").trim()
}

fn parse_opt<T: std::str::FromStr>(s: &str, col: &str, line: u64) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Malformed(format!("line {line}: bad {col} value {s:?}")))
}

fn parse_req<T: std::str::FromStr>(s: &str, col: &str, line: u64) -> Result<T> {
    parse_opt(s, col, line)?.ok_or_else(|| Error::Malformed(format!("line {line}: missing {col}")))
}

/// Reads a CSV written by [`write_sweep_csv`]. Columns are located by header
/// name; the `error` column may be absent.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Malformed(e.to_string()))?
        .clone();
    let mut idx = [usize::MAX; 9];
    for (col, name) in HEADER.iter().enumerate() {
        match headers.iter().position(|h| h.trim() == *name) {
            Some(p) => idx[col] = p,
            None if *name == "error" => {}
            None => return Err(Error::Malformed(format!("missing column {name:?}"))),
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Malformed(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let f = |col| field(&rec, &idx, col);
        let mode = f(0)
            .parse::<Mode>()
            .map_err(|_| Error::Malformed(format!("line {line}: bad mode {:?}", f(0))))?;
        rows.push(SweepRow {
            mode,
            target_acc: parse_req(f(1), HEADER[1], line)?,
            empirical_acc: parse_opt(f(2), HEADER[2], line)?,
            n_levels: parse_opt(f(3), HEADER[3], line)?,
            round_trips: parse_opt(f(4), HEADER[4], line)?,
            iterations: parse_req(f(5), HEADER[5], line)?,
            rate_per_million: parse_opt(f(6), HEADER[6], line)?,
            oracle_rate_per_million: parse_opt(f(7), HEADER[7], line)?,
            error: Some(f(8).to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(rows)
}
