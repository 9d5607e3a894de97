//! One-constant least-squares fit of simulated round-trip rates against the
//! limiting efficiency curve.
//!
//! Only the empirical acceptance rate enters the curve, and `c` multiplies
//! it by `1/c²`, so the choice of `c` moves the fitted scale but never the
//! quality of the fit.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::sweep::{read_sweep_csv, SweepRow};
use crate::error::{Error, Result};
use crate::scaling::{efficiency_from_acceptance, optimize, Mode};

pub const MIN_FIT_POINTS: usize = 5;
/// Half-width of the acceptance window used to refine the simulated argmax.
pub const ARGMAX_WINDOW: f64 = 0.1;

/// How to pick `c` for the theory curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CEffective {
    /// c = 1; the whole `1/c²` factor is absorbed into the fitted scale.
    Fit,
    Value(f64),
}

impl CEffective {
    /// Gaussian per-dimension value at the geometric midpoint of `[beta_min, 1]`.
    pub fn ladder_midpoint(beta_min: f64) -> Result<Self> {
        if !(beta_min > 0.0 && beta_min <= 1.0) {
            return Err(Error::invalid("beta_min", beta_min, "must lie in (0, 1]"));
        }
        Ok(Self::Value(1.0 / (beta_min.sqrt() * std::f64::consts::SQRT_2)))
    }

    pub fn c(self) -> f64 {
        match self {
            Self::Fit => 1.0,
            Self::Value(c) => c,
        }
    }
}

impl FromStr for CEffective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("fit") {
            return Ok(Self::Fit);
        }
        match s.parse::<f64>() {
            Ok(c) if c > 0.0 && c.is_finite() => Ok(Self::Value(c)),
            _ => Err(Error::invalid("c_effective", s, "expected `fit` or a positive number")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub acc: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub mode: Mode,
    pub c_effective: f64,
    pub points: usize,
    pub scale: f64,
    pub max_rel_dev: f64,
    pub argmax_acc_sim: f64,
    pub argmax_acc_theory: f64,
}

/// Fits `rate ≈ scale · eff(mode, acc, c)`.
pub fn fit_points(points: &[FitPoint], mode: Mode, c: CEffective) -> Result<FitResult> {
    let usable: Vec<FitPoint> = points
        .iter()
        .copied()
        .filter(|p| p.acc > 0.0 && p.acc < 1.0 && p.rate.is_finite())
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::invalid(
            "points",
            usable.len(),
            "a fit needs at least 5 usable points",
        ));
    }
    let cv = c.c();
    let theory = usable
        .iter()
        .map(|p| efficiency_from_acceptance(mode, p.acc, cv))
        .collect::<Result<Vec<f64>>>()?;
    let sty: f64 = theory.iter().zip(&usable).map(|(t, p)| t * p.rate).sum();
    let stt: f64 = theory.iter().map(|t| t * t).sum();
    let scale = sty / stt;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid("points", scale, "fitted scale is not positive"));
    }
    let max_rel_dev = theory
        .iter()
        .zip(&usable)
        .map(|(t, p)| (p.rate - scale * t).abs() / (scale * t))
        .fold(0.0, f64::max);
    Ok(FitResult {
        mode,
        c_effective: cv,
        points: usable.len(),
        scale,
        max_rel_dev,
        argmax_acc_sim: refined_argmax(&usable),
        argmax_acc_theory: optimize(mode, cv)?.acc_opt,
    })
}

/// Location of the largest rate, refined by a least-squares parabola through
/// the points within [`ARGMAX_WINDOW`] of the raw maximum. Falls back to the
/// raw argmax when the parabola is not concave or peaks outside the window.
pub fn refined_argmax(points: &[FitPoint]) -> f64 {
    let best = points
        .iter()
        .max_by(|a, b| a.rate.total_cmp(&b.rate))
        .expect("non-empty");
    let near: Vec<&FitPoint> = points
        .iter()
        .filter(|p| (p.acc - best.acc).abs() <= ARGMAX_WINDOW)
        .collect();
    if near.len() < 3 {
        return best.acc;
    }
    // centre x for conditioning
    let x0 = best.acc;
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for p in &near {
        let x = p.acc - x0;
        let pow = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += pow[i] * pow[j];
            }
            r[i] += pow[i] * p.rate;
        }
    }
    let Some([_, b, c]) = solve3(m, r) else {
        return best.acc;
    };
    let lo = near.iter().map(|p| p.acc).fold(f64::INFINITY, f64::min);
    let hi = near.iter().map(|p| p.acc).fold(f64::NEG_INFINITY, f64::max);
    let vertex = x0 - b / (2.0 * c);
    if c < 0.0 && vertex >= lo && vertex <= hi {
        vertex
    } else {
        best.acc
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = det3(&m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = r[i];
        }
        *slot = det3(&mk) / det;
    }
    Some(out)
}

/// Usable `(empirical_acc, rate_per_million)` pairs of one mode; rows with
/// an error or missing values are skipped.
pub fn read_fit_points(rows: &[SweepRow], mode: Mode) -> Vec<FitPoint> {
    rows.iter()
        .filter(|r| r.mode == mode && r.error.is_none())
        .filter_map(|r| {
            Some(FitPoint {
                acc: r.empirical_acc?,
                rate: r.rate_per_million?,
            })
        })
        .collect()
}

/// Fits every mode present in a sweep CSV, reversible first.
pub fn fit_sweep_csv(path: &Path, c: CEffective) -> Result<Vec<FitResult>> {
    let rows = read_sweep_csv(std::fs::File::open(path)?)?;
    let modes: Vec<Mode> = Mode::BOTH
        .into_iter()
        .filter(|m| rows.iter().any(|r| r.mode == *m))
        .collect();
    if modes.is_empty() {
        return Err(Error::Malformed(format!("{}: no data rows", path.display())));
    }
    modes
        .into_iter()
        .map(|m| fit_points(&read_fit_points(&rows, m), m, c))
        .collect()
}
