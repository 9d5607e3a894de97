//! Efficiency-versus-acceptance curves for both modes, plus a standalone
//! matplotlib script that draws them.

use std::io::Write;
use std::path::Path;

use super::fmt_f64;
use crate::error::Result;
use crate::scaling::{efficiency_from_acceptance, Mode, OptimalScaling};

pub const HEADER: [&str; 4] = ["acc", "eff_reversible", "eff_nonreversible", "ratio"];
pub const DEFAULT_GRID_POINTS: usize = 99;
pub const DEFAULT_GRID_RANGE: (f64, f64) = (0.01, 0.99);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub acc: f64,
    pub eff_reversible: f64,
    pub eff_nonreversible: f64,
    /// eff_nonreversible / eff_reversible
    pub ratio: f64,
}

pub fn curve_rows(c: f64, grid: &[f64]) -> Result<Vec<CurveRow>> {
    super::validate_grid(grid)?;
    grid.iter()
        .map(|&acc| {
            let rev = efficiency_from_acceptance(Mode::Reversible, acc, c)?;
            let non = efficiency_from_acceptance(Mode::Nonreversible, acc, c)?;
            Ok(CurveRow {
                acc,
                eff_reversible: rev,
                eff_nonreversible: non,
                ratio: non / rev,
            })
        })
        .collect()
}

pub fn write_curves<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.acc),
            fmt_f64(r.eff_reversible),
            fmt_f64(r.eff_nonreversible),
            fmt_f64(r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a Python script that plots `csv_path` with the optima marked by
/// dashed lines. The CSV is looked up next to the script.
pub fn write_plot_script(
    script: &Path,
    csv_path: &Path,
    reversible: &OptimalScaling,
    nonreversible: &OptimalScaling,
) -> Result<()> {
    let csv_name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    let body = format!(
        r#"#!/usr/bin/env python3
"""Efficiency curves: non-reversible (top, green) and reversible (bottom, blue)."""
import csv
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, {csv_name:?})
with open(path, newline="") as fh:
    rows = list(csv.DictReader(fh))
acc = [float(r["acc"]) for r in rows]
rev = [float(r["eff_reversible"]) for r in rows]
non = [float(r["eff_nonreversible"]) for r in rows]

plt.plot(acc, non, color="green", label="non-reversible")
plt.plot(acc, rev, color="blue", label="reversible")
plt.axvline({rev_acc:?}, color="blue", linestyle="--", linewidth=0.8)
plt.axvline({non_acc:?}, color="green", linestyle="--", linewidth=0.8)
plt.annotate("{rev_acc:.3}", ({rev_acc:?}, {rev_eff:?}), textcoords="offset points", xytext=(5, -15))
plt.annotate("{non_acc:.3}", ({non_acc:?}, {non_eff:?}), textcoords="offset points", xytext=(5, 5))
plt.xlabel("acceptance rate")
plt.ylabel("efficiency")
plt.legend()
out = os.path.splitext(path)[0] + ".png"
plt.savefig(out, dpi=150)
print(out)
"#,
        rev_acc = reversible.acc_opt,
        rev_eff = reversible.eff_opt,
        non_acc = nonreversible.acc_opt,
        non_eff = nonreversible.eff_opt,
    );
    std::fs::write(script, body)?;
    Ok(())
}
