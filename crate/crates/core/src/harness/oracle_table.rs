//! Noise-free counterpart of the sweep: exact round-trip rates from the
//! hitting-time oracle for the same ladders.

use std::io::Write;

use super::{fmt_f64, validate_grid};
use crate::error::{Error, Result};
use crate::oracle::{round_trip_rate_nonreversible, round_trip_rate_reversible, EdgeAcceptances};
use crate::scaling::Mode;
use crate::tempering::build_ladder;

pub const HEADER: [&str; 7] = [
    "mode",
    "target_acc",
    "n_levels",
    "mean_edge_acceptance",
    "empirical_acc",
    "expected_cycle_steps",
    "rate_per_million",
];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub mode: Mode,
    pub target_acc: f64,
    pub n_levels: usize,
    pub mean_edge_acceptance: f64,
    /// Acceptance rate under the uniform level distribution; the value a
    /// long simulation reports as its empirical acceptance.
    pub empirical_acc: f64,
    pub expected_cycle_steps: f64,
    pub rate_per_million: f64,
}

/// Edge acceptances are computed once per grid point and shared by the modes.
pub fn oracle_rows(d: usize, beta_min: f64, grid: &[f64], modes: &[Mode]) -> Result<Vec<OracleRow>> {
    validate_grid(grid)?;
    if modes.is_empty() {
        return Err(Error::invalid("modes", "[]", "need at least one mode"));
    }
    let per_point = grid
        .iter()
        .map(|&a| {
            let ladder = build_ladder(beta_min, a, d)?;
            let edges = EdgeAcceptances::for_ladder(&ladder, d)?;
            Ok((ladder.len(), edges))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(grid.len() * modes.len());
    for &mode in modes {
        for (&target_acc, (n_levels, edges)) in grid.iter().zip(&per_point) {
            let rate = match mode {
                Mode::Reversible => round_trip_rate_reversible(edges)?,
                Mode::Nonreversible => round_trip_rate_nonreversible(edges)?,
            };
            rows.push(OracleRow {
                mode,
                target_acc,
                n_levels: *n_levels,
                mean_edge_acceptance: edges.mean_up(),
                empirical_acc: edges.stationary_acceptance(),
                expected_cycle_steps: rate.expected_cycle_steps,
                rate_per_million: rate.rate_per_million(),
            });
        }
    }
    Ok(rows)
}

pub fn write_oracle_csv<W: Write>(rows: &[OracleRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.mode.as_str().to_string(),
            fmt_f64(r.target_acc),
            r.n_levels.to_string(),
            fmt_f64(r.mean_edge_acceptance),
            fmt_f64(r.empirical_acc),
            fmt_f64(r.expected_cycle_steps),
            fmt_f64(r.rate_per_million),
        ])?;
    }
    w.flush()?;
    Ok(())
}
