//! Efficiency of tempering moves as a function of the spacing `ℓ`.
//!
//! In the high-dimensional limit a temperature move at spacing `ℓ` is
//! accepted with probability `2Φ(−cℓ/2)`. The reversible scheme proposes
//! up or down with probability ½ (so `A = B = Φ(−cℓ/2)`); the lifted scheme
//! always proposes in its current direction (`A = 2Φ(−cℓ/2)`, `B = 0`).
//! Plugging either into the chain volatility gives `v(ℓ)`, and the
//! efficiency is `eff(ℓ) = ℓ²·v(ℓ)`.
//!
//! Everything here is a pure function of its inputs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::volatility;
use crate::error::{Error, Result};
use crate::minimize::brent_maximize;
pub use crate::normal::{normal_cdf, normal_quantile};
use crate::normal::two_sided_mass;

/// Reversible (symmetric ±1 proposals) or non-reversible (lifted) dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Reversible,
    Nonreversible,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Reversible, Mode::Nonreversible];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Reversible => "reversible",
            Mode::Nonreversible => "nonreversible",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rev" | "reversible" => Ok(Mode::Reversible),
            "nonrev" | "nonreversible" => Ok(Mode::Nonreversible),
            _ => Err(Error::invalid("mode", s, "expected rev or nonrev")),
        }
    }
}

/// Optimal spacing, with the acceptance rate and efficiency it achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalScaling {
    pub ell_opt: f64,
    pub acc_opt: f64,
    pub eff_opt: f64,
}

/// One point on an efficiency curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    pub ell: f64,
    pub acc: f64,
    pub eff: f64,
}

/// A problem constant `c > 0` together with the dynamics being tuned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingProblem {
    c: f64,
    mode: Mode,
}

impl ScalingProblem {
    pub fn new(c: f64, mode: Mode) -> Result<Self> {
        check_positive("c", c)?;
        Ok(Self { c, mode })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn point(&self, ell: f64) -> Result<EfficiencyPoint> {
        Ok(EfficiencyPoint {
            ell,
            acc: acceptance_rate(ell, self.c)?,
            eff: efficiency(self.mode, ell, self.c)?,
        })
    }

    pub fn optimize(&self) -> OptimalScaling {
        optimize_valid(self.mode, self.c)
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, x, "must be positive and finite"))
    }
}

fn check_probability(name: &'static str, a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, a, "must lie in (0, 1)"))
    }
}

/// Asymptotic acceptance probability `2Φ(−cℓ/2)`.
pub fn acceptance_rate(ell: f64, c: f64) -> Result<f64> {
    check_positive("ell", ell)?;
    check_positive("c", c)?;
    Ok(2.0 * normal_cdf(-c * ell / 2.0))
}

/// `ℓ²·v(ℓ)` with `v` from the chain volatility under the mode's `(A, B)`.
pub fn efficiency(mode: Mode, ell: f64, c: f64) -> Result<f64> {
    check_positive("ell", ell)?;
    check_positive("c", c)?;
    Ok(efficiency_unchecked(mode, ell, c))
}

fn efficiency_unchecked(mode: Mode, ell: f64, c: f64) -> f64 {
    let s = c * ell / 2.0;
    let half = normal_cdf(-s);
    // C = 1 − 2Φ(−s) in both modes
    let flip = two_sided_mass(s);
    let v = match mode {
        Mode::Reversible => volatility(half, half, flip),
        Mode::Nonreversible => volatility(2.0 * half, 0.0, flip),
    };
    ell * ell * v
}

/// Efficiency expressed through the acceptance rate `a` instead of `ℓ`:
/// `a·(4/c²)·[Φ⁻¹(a/2)]²`, divided by `1 − a` for the lifted scheme.
pub fn efficiency_from_acceptance(mode: Mode, a: f64, c: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_positive("c", c)?;
    let z = normal_quantile(a / 2.0)?;
    let reversible = a * 4.0 / (c * c) * z * z;
    Ok(match mode {
        Mode::Reversible => reversible,
        Mode::Nonreversible => reversible / (1.0 - a),
    })
}

/// Non-reversible to reversible efficiency at equal acceptance, `1/(1 − a)`.
pub fn efficiency_ratio_at_acceptance(a: f64) -> Result<f64> {
    check_probability("a", a)?;
    Ok(1.0 / (1.0 - a))
}

/// Relative tolerance of the spacing search.
pub const OPTIMIZER_TOL: f64 = 1e-8;
/// Search bracket for `cℓ`.
pub const BRACKET: (f64, f64) = (1e-6, 20.0);

/// Maximizes [`efficiency`] over `ℓ ∈ (0, 20/c]`.
///
/// The search runs in `s = cℓ/2`, where both curves peak near 1 whatever
/// `c` is, so the tolerance means the same thing for every `c`.
pub fn optimize(mode: Mode, c: f64) -> Result<OptimalScaling> {
    check_positive("c", c)?;
    Ok(optimize_valid(mode, c))
}

fn optimize_valid(mode: Mode, c: f64) -> OptimalScaling {
    let (lo, hi) = (BRACKET.0 / 2.0, BRACKET.1 / 2.0);
    let best = brent_maximize(
        |s| efficiency_unchecked(mode, 2.0 * s / c, c),
        lo,
        hi,
        OPTIMIZER_TOL,
        500,
    );
    let ell_opt = 2.0 * best.x / c;
    OptimalScaling {
        ell_opt,
        acc_opt: 2.0 * normal_cdf(-best.x),
        eff_opt: best.value,
    }
}

/// Number of points in the unimodality scan of [`maximize_generic`].
pub const SCAN_POINTS: usize = 1024;

/// Maximizes `ℓ²·A(ℓ)` (reversible form) or `ℓ²·A(ℓ)/(1 − A(ℓ))` (lifted
/// form, no backward moves) for an arbitrary acceptance profile `A`.
///
/// A 1024-point scan of the bracket guards against multimodal objectives;
/// Brent's method then refines the best scan cell. The reversible form
/// omits the factor 2 that `v = 2A` would carry; it does not move the
/// maximizer. The returned `acc_opt` is `A(ℓ_opt)` itself.
pub fn maximize_generic<F>(accept_fn: F, mode: Mode, bracket: (f64, f64)) -> Result<OptimalScaling>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = bracket;
    check_positive("bracket.lo", lo)?;
    check_positive("bracket.hi", hi)?;
    if lo >= hi {
        return Err(Error::invalid("bracket", format!("({lo}, {hi})"), "lo must be below hi"));
    }
    let objective = |ell: f64| {
        let a = accept_fn(ell);
        match mode {
            Mode::Reversible => ell * ell * a,
            Mode::Nonreversible => ell * ell * a / (1.0 - a),
        }
    };

    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let mut values = Vec::with_capacity(SCAN_POINTS);
    for &ell in &grid {
        let a = accept_fn(ell);
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid("accept_fn", format!("A({ell}) = {a}"), "must lie in (0, 1)"));
        }
        values.push(objective(ell));
    }

    let mut sign_changes = 0;
    let mut last_sign = 0.0;
    for w in values.windows(2) {
        let diff = w[1] - w[0];
        if diff == 0.0 {
            continue;
        }
        let sign = diff.signum();
        if last_sign != 0.0 && sign != last_sign {
            sign_changes += 1;
        }
        last_sign = sign;
    }
    if sign_changes > 1 {
        return Err(Error::NotUnimodal { lo, hi, sign_changes });
    }

    let (imax, _) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("scan is non-empty");
    if imax == 0 || imax == SCAN_POINTS - 1 {
        return Err(Error::BoundaryMaximum(grid[imax]));
    }
    let best = brent_maximize(objective, grid[imax - 1], grid[imax + 1], OPTIMIZER_TOL, 500);
    Ok(OptimalScaling {
        ell_opt: best.x,
        acc_opt: accept_fn(best.x),
        eff_opt: best.value,
    })
}
