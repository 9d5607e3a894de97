//! The double birth-death chain on `Z × {+, -}`.
//!
//! On the top row the walker steps right with probability `A`, left with
//! probability `B`, and switches rows with probability `C`; the bottom row
//! is the mirror image. Rescaled by `√M` the horizontal coordinate converges
//! to Brownian motion with volatility `(A-B)²/C + (A+B)`.
//!
//! Besides step-by-step simulation this module samples the regenerative
//! blocks of the chain directly: one block is a top-row sojourn followed by
//! a bottom-row sojourn, each of `Geom(C)` length with `±1` increments.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::stats;

/// Tolerance on `A + B + C = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Transition probabilities `(A, B, C)` of the lifted walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    a: f64,
    b: f64,
    c: f64,
}

impl ChainParams {
    /// Validates `A, B ≥ 0`, `C > 0` and `|A + B + C − 1| ≤ 1e-12`, then
    /// renormalizes so the three probabilities sum to one.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite ({a}, {b}, {c})")));
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::InvalidParams(format!("A={a}, B={b} must be non-negative")));
        }
        if c <= 0.0 {
            return Err(Error::InvalidParams(format!("C={c} must be positive")));
        }
        let sum = a + b + c;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidParams(format!("A+B+C = {sum}, expected 1")));
        }
        Ok(Self {
            a: a / sum,
            b: b / sum,
            c: c / sum,
        })
    }

    /// Probability of a step in the current direction.
    pub fn forward(&self) -> f64 {
        self.a
    }

    /// Probability of a step against the current direction.
    pub fn backward(&self) -> f64 {
        self.b
    }

    /// Probability of switching rows.
    pub fn flip(&self) -> f64 {
        self.c
    }
}

/// The row of the lifted walk; `Plus` drifts right when `A > B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        }
    }
}

/// Position `X_n` and row `Y_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkerState {
    pub x: i64,
    pub dir: Direction,
}

impl WalkerState {
    pub const ORIGIN: WalkerState = WalkerState {
        x: 0,
        dir: Direction::Plus,
    };
}

/// One transition of the lifted walk.
pub fn step<R: Rng + ?Sized>(state: WalkerState, params: &ChainParams, rng: &mut R) -> WalkerState {
    let u: f64 = rng.random();
    if u < params.a {
        WalkerState {
            x: state.x + state.dir.sign(),
            ..state
        }
    } else if u < params.a + params.b {
        WalkerState {
            x: state.x - state.dir.sign(),
            ..state
        }
    } else {
        WalkerState {
            dir: state.dir.flipped(),
            ..state
        }
    }
}

/// `v = (A − B)²/C + (A + B)`.
pub fn theoretical_volatility(params: &ChainParams) -> f64 {
    volatility(params.a, params.b, params.c)
}

pub(crate) fn volatility(a: f64, b: f64, c: f64) -> f64 {
    (a - b).powi(2) / c + (a + b)
}

/// Displacement and duration of one regenerative block (a full `+` then `−`
/// sojourn, ending on the return to the top row).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegenerativeBlock {
    pub dx: i64,
    pub dt: u64,
}

/// Samples a block without stepping the chain: the two sojourn lengths are
/// `Geom(C)` on `{0, 1, …}`, and each sojourn step moves `+1` with
/// probability `A/(1−C)`.
pub fn sample_block<R: Rng + ?Sized>(params: &ChainParams, rng: &mut R) -> RegenerativeBlock {
    let g = sojourn_length(params, rng);
    let h = sojourn_length(params, rng);
    let top = signed_sum(g, params, rng);
    let bottom = signed_sum(h, params, rng);
    RegenerativeBlock {
        dx: top - bottom,
        dt: g + h + 2,
    }
}

fn sojourn_length<R: Rng + ?Sized>(params: &ChainParams, rng: &mut R) -> u64 {
    if params.c >= 1.0 {
        return 0;
    }
    Geometric::new(params.c).expect("C in (0, 1)").sample(rng)
}

// Sum of n i.i.d. ±1 signs with P(+1) = A/(A+B): 2·Binomial(n, p) − n.
fn signed_sum<R: Rng + ?Sized>(n: u64, params: &ChainParams, rng: &mut R) -> i64 {
    if n == 0 {
        return 0;
    }
    let p = params.a / (params.a + params.b);
    let ups = Binomial::new(n, p).expect("p in [0, 1]").sample(rng);
    2 * ups as i64 - n as i64
}

/// Monte Carlo estimate of the limiting volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolatilityEstimate {
    pub v_hat: f64,
    pub std_err: f64,
    pub replicates: usize,
    pub steps_per_replicate: u64,
}

impl VolatilityEstimate {
    /// Number of standard errors between the estimate and `v`.
    pub fn z_score(&self, v: f64) -> f64 {
        (self.v_hat - v) / self.std_err
    }
}

pub const MIN_VOLATILITY_STEPS: u64 = 10_000;
pub const MIN_VOLATILITY_REPLICATES: usize = 10;

/// Runs `replicates` independent chains from `(0, +)` for `steps` steps and
/// averages `X²/steps`.
pub fn estimate_volatility(
    params: &ChainParams,
    steps: u64,
    replicates: usize,
    seed: u64,
) -> Result<VolatilityEstimate> {
    if steps < MIN_VOLATILITY_STEPS {
        return Err(Error::invalid("steps", steps, "must be at least 10^4"));
    }
    if replicates < MIN_VOLATILITY_REPLICATES {
        return Err(Error::invalid("replicates", replicates, "must be at least 10"));
    }
    let samples: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let x = endpoint(params, steps, seed, r as u64);
            (x as f64).powi(2) / steps as f64
        })
        .collect();
    let (v_hat, _) = stats::mean_var(&samples);
    Ok(VolatilityEstimate {
        v_hat,
        std_err: stats::std_err(&samples),
        replicates,
        steps_per_replicate: steps,
    })
}

/// `X_steps` of replicate `index` started from `(0, +)`.
pub fn endpoint(params: &ChainParams, steps: u64, seed: u64, index: u64) -> i64 {
    let mut rng = rng::stream(seed, index);
    let mut state = WalkerState::ORIGIN;
    for _ in 0..steps {
        state = step(state, params, &mut rng);
    }
    state.x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::within_binomial_sigma;
    use rand::Rng;
    use proptest::prelude::*;

    fn params(a: f64, b: f64, c: f64) -> ChainParams {
        ChainParams::new(a, b, c).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(ChainParams::new(0.5, 0.5, 0.0).is_err());
        assert!(ChainParams::new(-0.1, 0.6, 0.5).is_err());
        assert!(ChainParams::new(0.3, 0.3, 0.3).is_err());
        assert!(ChainParams::new(f64::NAN, 0.5, 0.5).is_err());
        // within tolerance is renormalized
        let p = ChainParams::new(0.25, 0.25, 0.5 + 5e-13).unwrap();
        assert_eq!(p.forward() + p.backward() + p.flip(), 1.0);
    }

    #[test]
    fn volatility_closed_forms() {
        assert!((theoretical_volatility(&params(0.25, 0.25, 0.5)) - 0.5).abs() < 1e-15);
        assert!((theoretical_volatility(&params(0.5, 0.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((theoretical_volatility(&params(0.45, 0.05, 0.5)) - 0.82).abs() < 1e-15);
        assert_eq!(theoretical_volatility(&params(0.0, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn step_frequencies_top_row() {
        let p = params(0.98, 0.0, 0.02);
        let mut rng = rng::stream(1, 0);
        let n = 1_000_000u64;
        let (mut right, mut flip) = (0u64, 0u64);
        for _ in 0..n {
            let s = step(WalkerState::ORIGIN, &p, &mut rng);
            match s {
                WalkerState { x: 1, dir: Direction::Plus } => right += 1,
                WalkerState { x: 0, dir: Direction::Minus } => flip += 1,
                other => panic!("impossible transition to {other:?}"),
            }
        }
        assert!(within_binomial_sigma(right, n, 0.98, 4.0));
        assert!(within_binomial_sigma(flip, n, 0.02, 4.0));
    }

    #[test]
    fn step_frequencies_bottom_row() {
        let p = params(0.3, 0.2, 0.5);
        let start = WalkerState { x: 5, dir: Direction::Minus };
        let mut rng = rng::stream(2, 0);
        let n = 1_000_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let s = step(start, &p, &mut rng);
            counts[(s.x - 4) as usize] += 1;
            if s.x == 5 {
                assert_eq!(s.dir, Direction::Plus);
            } else {
                assert_eq!(s.dir, Direction::Minus);
            }
        }
        for (hits, prob) in counts.iter().zip([0.3, 0.5, 0.2]) {
            assert!(within_binomial_sigma(*hits, n, prob, 4.0), "{counts:?}");
        }
    }

    #[test]
    fn no_backward_moves_when_b_is_zero() {
        let p = params(0.7, 0.0, 0.3);
        let mut rng = rng::stream(3, 0);
        let mut s = WalkerState::ORIGIN;
        for _ in 0..100_000 {
            let next = step(s, &p, &mut rng);
            if next.dir == s.dir {
                assert_eq!(next.x - s.x, s.dir.sign());
            }
            s = next;
        }
    }

    #[test]
    fn merged_chain_is_symmetric() {
        // forgetting the row, with the row uniform the increment is ±1 w.p. (A+B)/2
        let p = params(0.6, 0.1, 0.3);
        let mut rng = rng::stream(4, 0);
        let n = 1_000_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            let dir = if rng.random::<bool>() { Direction::Plus } else { Direction::Minus };
            let s = step(WalkerState { x: 0, dir }, &p, &mut rng);
            counts[(s.x + 1) as usize] += 1;
        }
        let half = (0.6 + 0.1) / 2.0;
        assert!(within_binomial_sigma(counts[0], n, half, 4.0), "{counts:?}");
        assert!(within_binomial_sigma(counts[1], n, 0.3, 4.0), "{counts:?}");
        assert!(within_binomial_sigma(counts[2], n, half, 4.0), "{counts:?}");
    }

    #[test]
    fn block_with_certain_flip() {
        let p = params(0.0, 0.0, 1.0);
        let mut rng = rng::stream(5, 0);
        for _ in 0..100 {
            assert_eq!(sample_block(&p, &mut rng), RegenerativeBlock { dx: 0, dt: 2 });
        }
    }

    #[test]
    fn block_duration_mean() {
        let p = params(0.3, 0.2, 0.5);
        let mut rng = rng::stream(6, 0);
        let n = 1_000_000;
        let dts: Vec<f64> = (0..n).map(|_| sample_block(&p, &mut rng).dt as f64).collect();
        assert!(dts.iter().all(|&t| t >= 2.0));
        let (m, _) = stats::mean_var(&dts);
        // Var(dt) = 2(1-C)/C²
        let sd = (2.0 * 0.5 / 0.25 / n as f64).sqrt();
        assert!((m - 4.0).abs() < 4.0 * sd, "mean {m}");
    }

    #[test]
    fn block_displacement_moments() {
        let p = params(0.45, 0.05, 0.5);
        let mut rng = rng::stream(7, 0);
        let n = 1_000_000;
        let dxs: Vec<f64> = (0..n).map(|_| sample_block(&p, &mut rng).dx as f64).collect();
        let (m, v) = stats::mean_var(&dxs);
        let var = 2.0 * 0.4f64.powi(2) / 0.25 + 2.0 * (0.5 / 0.5);
        assert!((var - 3.28).abs() < 1e-12);
        assert!(m.abs() < 4.0 * (var / n as f64).sqrt(), "mean {m}");
        // Var of the sample variance uses the fourth central moment
        let m4 = dxs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
        let sd_var = ((m4 - v * v) / n as f64).sqrt();
        assert!((v - var).abs() < 4.0 * sd_var, "var {v} vs {var}");
    }

    #[test]
    fn volatility_preconditions() {
        let p = params(0.25, 0.25, 0.5);
        assert!(estimate_volatility(&p, 9_999, 10, 0).is_err());
        assert!(estimate_volatility(&p, 10_000, 9, 0).is_err());
    }

    #[test]
    fn volatility_estimate_is_deterministic() {
        let p = params(0.45, 0.05, 0.5);
        let a = estimate_volatility(&p, 10_000, 10, 42).unwrap();
        let b = estimate_volatility(&p, 10_000, 10, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.std_err > 0.0);
    }

    proptest! {
        #[test]
        fn volatility_symmetric_in_a_and_b(a in 0.0f64..1.0, frac in 0.01f64..0.99) {
            // split the mass 1-a between B and C... then swap A and B
            let b = (1.0 - a) * (1.0 - frac);
            let c = 1.0 - a - b;
            prop_assume!(c > 0.0);
            let p = ChainParams::new(a, b, c).unwrap();
            let q = ChainParams::new(b, a, c).unwrap();
            prop_assert!((theoretical_volatility(&p) - theoretical_volatility(&q)).abs() < 1e-12);
        }

        #[test]
        fn transition_probabilities_conserved(a in 0.0f64..1.0, frac in 0.001f64..0.999) {
            let b = (1.0 - a) * (1.0 - frac);
            let c = 1.0 - a - b;
            prop_assume!(c > 0.0);
            let p = ChainParams::new(a, b, c).unwrap();
            prop_assert!((p.forward() + p.backward() + p.flip() - 1.0).abs() <= 1e-15);
        }
    }
}
