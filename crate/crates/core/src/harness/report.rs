//! Text reports for the `volatility` and `optimal` commands.

use std::fmt;

use serde::Serialize;

use crate::chain::{estimate_volatility, theoretical_volatility, ChainParams};
use crate::error::Result;
use crate::scaling::{optimize, OptimalScaling, Mode};

/// Estimates more than this many standard errors from theory fail.
pub const VOLATILITY_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolatilityReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theoretical: f64,
    pub estimate: f64,
    pub std_err: f64,
    pub z: f64,
    pub steps: u64,
    pub replicates: usize,
    pub pass: bool,
}

pub fn volatility_report(
    params: &ChainParams,
    steps: u64,
    replicates: usize,
    seed: u64,
) -> Result<VolatilityReport> {
    let theoretical = theoretical_volatility(params);
    let est = estimate_volatility(params, steps, replicates, seed)?;
    let z = est.z_score(theoretical);
    Ok(VolatilityReport {
        a: params.forward(),
        b: params.backward(),
        c: params.flip(),
        theoretical,
        estimate: est.v_hat,
        std_err: est.std_err,
        z,
        steps,
        replicates,
        pass: z.abs() <= VOLATILITY_SIGMAS,
    })
}

impl fmt::Display for VolatilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "params       A={} B={} C={}", self.a, self.b, self.c)?;
        writeln!(f, "theoretical  {:.6}", self.theoretical)?;
        writeln!(f, "estimate     {:.6} ± {:.6}  ({} × {} steps)", self.estimate, self.std_err, self.replicates, self.steps)?;
        writeln!(
            f,
            "z            {:+.3}  {}",
            self.z,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalReport {
    pub c: f64,
    pub reversible: OptimalScaling,
    pub nonreversible: OptimalScaling,
    /// nonreversible eff_opt / reversible eff_opt
    pub ratio: f64,
}

pub fn optimal_report(c: f64) -> Result<OptimalReport> {
    let reversible = optimize(Mode::Reversible, c)?;
    let nonreversible = optimize(Mode::Nonreversible, c)?;
    Ok(OptimalReport {
        c,
        reversible,
        nonreversible,
        ratio: nonreversible.eff_opt / reversible.eff_opt,
    })
}

impl fmt::Display for OptimalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c = {}", self.c)?;
        writeln!(f, "{:<14} {:>10} {:>8} {:>10}", "mode", "ell_opt", "acc_opt", "eff_opt")?;
        for (name, o) in [("reversible", &self.reversible), ("nonreversible", &self.nonreversible)] {
            writeln!(f, "{name:<14} {:>10.4} {:>8.4} {:>10.4}", o.ell_opt, o.acc_opt, o.eff_opt)?;
        }
        writeln!(f, "ratio {:.4}", self.ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_table() {
        let r = optimal_report(1.0).unwrap();
        assert!((r.ratio - 1.4254).abs() < 5e-4);
        let text = r.to_string();
        assert!(text.contains("2.3812") && text.contains("1.7285"), "{text}");
        assert!((r.nonreversible.acc_opt - 0.387).abs() < 1e-3);
    }

    #[test]
    fn halving_spacing_at_double_c() {
        let one = optimal_report(1.0).unwrap();
        let two = optimal_report(2.0).unwrap();
        assert!((two.reversible.ell_opt - one.reversible.ell_opt / 2.0).abs() < 1e-6);
        assert!((two.nonreversible.eff_opt - one.nonreversible.eff_opt / 4.0).abs() < 1e-9);
        assert!((two.ratio - one.ratio).abs() < 1e-9);
    }

    #[test]
    fn volatility_passes_on_the_symmetric_chain() {
        let p = ChainParams::new(0.25, 0.25, 0.5).unwrap();
        let r = volatility_report(&p, 20_000, 40, 3).unwrap();
        assert_eq!(r.theoretical, 0.5);
        assert!(r.pass, "{r}");
    }
}
