//! Experiment orchestration behind the command-line tool: configuration,
//! parallel sweeps, CSV emission and the least-squares comparison against
//! the limiting efficiency curves.
//!
//! Every floating-point CSV field is written with 17 significant digits so
//! a value survives a write/read round trip unchanged.

pub mod config;
pub mod curves;
pub mod fit;
pub mod oracle_table;
pub mod report;
pub mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub use config::{FileConfig, WORKERS_ENV};
pub use curves::{curve_rows, write_curves, write_plot_script, CurveRow};
pub use fit::{fit_points, fit_sweep_csv, read_fit_points, CEffective, FitPoint, FitResult};
pub use oracle_table::{oracle_rows, write_oracle_csv, OracleRow};
pub use report::{optimal_report, volatility_report, OptimalReport, VolatilityReport};
pub use sweep::{read_sweep_csv, run_sweep, write_sweep_csv, SweepConfig, SweepRow};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // NaN / inf in the Rust spelling, which `f64::from_str` accepts back
        format!("{x}")
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Checks an acceptance grid: non-empty, finite, strictly increasing, inside (0, 1).
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "[]", "must contain at least one value"));
    }
    for &a in grid {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid("grid", a, "values must lie in (0, 1)"));
        }
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "grid",
            format!("{}, {}", w[0], w[1]),
            "must be strictly increasing",
        ));
    }
    Ok(())
}

/// Builds a rayon pool with `workers` threads (0 = rayon's default).
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Opens `path` for writing, or stdout when `path` is `None`.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.381_2e-7, -5.5e300, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn default_sweep_grid() {
        let g = linspace(0.05, 0.95, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[19], 0.95);
        validate_grid(&g).unwrap();
    }

    #[test]
    fn grid_rejections() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.2, 0.2]).is_err());
        assert!(validate_grid(&[0.3, 0.2]).is_err());
        assert!(validate_grid(&[0.0, 0.5]).is_err());
        assert!(validate_grid(&[0.5, 1.0]).is_err());
        assert!(validate_grid(&[f64::NAN]).is_err());
    }
}
