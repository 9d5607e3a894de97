//! Exact round-trip rates for a finite ladder.
//!
//! With exact resampling at every iteration, the level process is itself a
//! Markov chain: the reversible one on `{0, …, N}`, the lifted one on
//! `{0, …, N} × {+, −}`. Its transition probabilities are the expected
//! acceptances of each adjacent move, computed here by quadrature against
//! the chi-squared law of `S`. Expected round-trip times then follow from
//! first-passage linear systems.

use crate::chain::Direction;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::tempering::Ladder;
use statrs::function::gamma::ln_gamma;

/// Absolute error target of [`edge_acceptance`].
pub const EDGE_TOLERANCE: f64 = 1e-8;

/// Expected acceptance of every adjacent move on a ladder: `up[k]` for
/// `β_k → β_{k+1}`, `down[k]` for `β_{k+1} → β_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAcceptances {
    up: Vec<f64>,
    down: Vec<f64>,
}

impl EdgeAcceptances {
    /// Entries must lie in `[0, 1]`. A zero edge is accepted here so the
    /// hitting-time solvers can report the resulting singular system.
    pub fn new(up: Vec<f64>, down: Vec<f64>) -> Result<Self> {
        if up.is_empty() || up.len() != down.len() {
            return Err(Error::invalid(
                "edges",
                format!("{} up / {} down", up.len(), down.len()),
                "need equal, non-zero numbers of up and down edges",
            ));
        }
        if let Some(a) = up.iter().chain(&down).find(|a| !(**a >= 0.0 && **a <= 1.0)) {
            return Err(Error::invalid("edges", a, "acceptance must lie in [0, 1]"));
        }
        Ok(Self { up, down })
    }

    /// All edges accept with probability `a` in both directions.
    pub fn uniform(levels: usize, a: f64) -> Result<Self> {
        Self::new(vec![a; levels], vec![a; levels])
    }

    /// Quadrature over every edge of `ladder` at dimension `d`.
    pub fn for_ladder(ladder: &Ladder, d: usize) -> Result<Self> {
        let b = ladder.betas();
        let up = b
            .windows(2)
            .map(|w| edge_acceptance(w[0], w[1], d))
            .collect::<Result<Vec<_>>>()?;
        let down = b
            .windows(2)
            .map(|w| edge_acceptance(w[1], w[0], d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(up, down)
    }

    pub fn up(&self) -> &[f64] {
        &self.up
    }

    pub fn down(&self) -> &[f64] {
        &self.down
    }

    /// `N`, the number of edges.
    pub fn levels(&self) -> usize {
        self.up.len()
    }

    fn check_connected(&self) -> Result<()> {
        match self.up.iter().chain(&self.down).position(|&a| a == 0.0) {
            Some(k) => Err(Error::Singular(format!("edge {} never accepts", k % self.levels()))),
            None => Ok(()),
        }
    }

    pub fn mean_up(&self) -> f64 {
        self.up.iter().sum::<f64>() / self.up.len() as f64
    }

    /// Long-run fraction of iterations with an accepted move when the level
    /// marginal is uniform: out-of-range proposals dilute the mean edge
    /// acceptance by `N/(N+1)`.
    pub fn stationary_acceptance(&self) -> f64 {
        let n = self.levels() as f64;
        (self.up.iter().sum::<f64>() + self.down.iter().sum::<f64>()) / (2.0 * (n + 1.0))
    }
}

/// Expected cycle length of `0 → N → 0` and its reciprocal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripRate {
    pub expected_cycle_steps: f64,
    pub rate_per_step: f64,
}

impl RoundTripRate {
    fn from_cycle(steps: f64) -> Result<Self> {
        if !(steps.is_finite() && steps > 0.0) {
            return Err(Error::Singular(format!("expected cycle length {steps}")));
        }
        Ok(Self {
            expected_cycle_steps: steps,
            rate_per_step: 1.0 / steps,
        })
    }

    pub fn rate_per_million(&self) -> f64 {
        self.rate_per_step * 1e6
    }
}

/// `E[min(1, exp(−(β′−β)S/2 + (d/2)·log(β′/β)))]` with `S ~ χ²_d / β`.
///
/// Integrates in `t = √(βS)` (so `t²` is chi-squared), which keeps the
/// integrand smooth at the origin for every `d`, and splits the range at the
/// point where the Metropolis ratio crosses 1.
pub fn edge_acceptance(beta_from: f64, beta_to: f64, d: usize) -> Result<f64> {
    for (name, b) in [("beta_from", beta_from), ("beta_to", beta_to)] {
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::invalid(name, b, "must lie in (0, 1]"));
        }
    }
    if beta_from == beta_to {
        return Err(Error::invalid("beta_to", beta_to, "must differ from beta_from"));
    }
    if d == 0 {
        return Err(Error::invalid("d", d, "must be at least 1"));
    }
    let df = d as f64;
    let ratio = beta_to / beta_from;
    let half_d_log_ratio = 0.5 * df * ratio.ln();
    // log density of t where t² ~ χ²_d
    let log_norm = (1.0 - 0.5 * df) * std::f64::consts::LN_2 - ln_gamma(0.5 * df);
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let x = t * t;
        let log_pdf = log_norm + (df - 1.0) * t.ln() - 0.5 * x;
        let log_accept = (-(ratio - 1.0) * x / 2.0 + half_d_log_ratio).min(0.0);
        (log_pdf + log_accept).exp()
    };

    let spread = 40.0 * (2.0 * df).sqrt();
    let lo = (df - spread).max(0.0).sqrt();
    let hi = (df + spread + 200.0).sqrt();
    let kink = (beta_from * df * ratio.ln() / (beta_to - beta_from)).sqrt();
    let mut cuts = vec![lo];
    if kink > lo && kink < hi {
        cuts.push(kink);
    }
    cuts.push(hi);
    let mut total = 0.0;
    let pieces = (cuts.len() - 1) as f64;
    for w in cuts.windows(2) {
        total += quadrature::integrate(integrand, w[0], w[1], 1e-3 * EDGE_TOLERANCE / pieces, 16)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Solves `M h = rhs` for a banded `M` (lower bandwidth `kl`, upper `ku`)
/// by Gaussian elimination without pivoting. The hitting-time matrices
/// `I − Q` are diagonally dominant M-matrices, for which this is stable; a
/// vanishing pivot means the target is unreachable from some state.
struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    // row i stores columns i-kl ..= i+ku
    a: Vec<f64>,
}

impl Banded {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            a: vec![0.0; n * (kl + ku + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku);
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.a[k] += v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[self.idx(i, j)]
    }

    fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        for k in 0..n {
            let pivot = self.get(k, k);
            if !(pivot > 0.0 && pivot.is_finite()) {
                return Err(Error::Singular(format!("zero pivot in row {k}")));
            }
            for i in k + 1..n.min(k + self.kl + 1) {
                let factor = self.get(i, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..n.min(k + self.ku + 1) {
                    let v = self.get(k, j);
                    self.add(i, j, -factor * v);
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let mut acc = rhs[k];
            for j in k + 1..n.min(k + self.ku + 1) {
                acc -= self.get(k, j) * rhs[j];
            }
            rhs[k] = acc / self.get(k, k);
        }
        Ok(rhs)
    }
}

/// Expected steps to reach `target` from every state, for a chain given by
/// `moves(i) -> [(j, p)]` listing every transition out of `i`.
fn hitting_times<M>(n: usize, band: usize, is_target: impl Fn(usize) -> bool, moves: M) -> Result<Vec<f64>>
where
    M: Fn(usize) -> Vec<(usize, f64)>,
{
    let mut m = Banded::new(n, band, band);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        m.add(i, i, 1.0);
        if is_target(i) {
            continue;
        }
        rhs[i] = 1.0;
        // h_i = 1 + Σ_j p_ij h_j
        for (j, p) in moves(i) {
            m.add(i, j, -p);
        }
    }
    let h = m.solve(rhs)?;
    if let Some(bad) = h.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Singular(format!("hitting time {bad}")));
    }
    Ok(h)
}

/// Reversible level chain: propose ±1 with probability ½, accept per edge,
/// hold on out-of-range proposals.
pub fn round_trip_rate_reversible(edges: &EdgeAcceptances) -> Result<RoundTripRate> {
    edges.check_connected()?;
    let top = edges.levels();
    let n = top + 1;
    let moves = |i: usize| {
        let mut out = Vec::with_capacity(3);
        let mut stay = 1.0;
        if i < top {
            let p = 0.5 * edges.up[i];
            out.push((i + 1, p));
            stay -= p;
        }
        if i > 0 {
            let p = 0.5 * edges.down[i - 1];
            out.push((i - 1, p));
            stay -= p;
        }
        out.push((i, stay));
        out
    };
    let ascend = hitting_times(n, 1, |i| i == top, moves)?;
    let descend = hitting_times(n, 1, |i| i == 0, moves)?;
    RoundTripRate::from_cycle(ascend[0] + descend[top])
}

fn lifted_index(level: usize, dir: Direction) -> usize {
    2 * level + usize::from(dir == Direction::Minus)
}

/// Lifted level chain: move in the current direction if accepted, reverse
/// the direction on a rejection or an out-of-range proposal.
///
/// The cycle starts on arrival at level 0 (necessarily moving down, so in
/// state `(0, −)`) and ends on the next arrival at 0 after visiting `N`
/// (arrival at `N` is in state `(N, +)`).
pub fn round_trip_rate_nonreversible(edges: &EdgeAcceptances) -> Result<RoundTripRate> {
    edges.check_connected()?;
    let top = edges.levels();
    let n = 2 * (top + 1);
    let moves = |i: usize| {
        let level = i / 2;
        let dir = if i.is_multiple_of(2) { Direction::Plus } else { Direction::Minus };
        let (next, p) = match dir {
            Direction::Plus if level < top => (Some(level + 1), edges.up[level]),
            Direction::Minus if level > 0 => (Some(level - 1), edges.down[level - 1]),
            _ => (None, 0.0),
        };
        let mut out = Vec::with_capacity(2);
        if let Some(next) = next {
            out.push((lifted_index(next, dir), p));
        }
        out.push((lifted_index(level, dir.flipped()), 1.0 - p));
        out
    };
    let ascend = hitting_times(n, 2, |i| i / 2 == top, moves)?;
    let descend = hitting_times(n, 2, |i| i / 2 == 0, moves)?;
    RoundTripRate::from_cycle(
        ascend[lifted_index(0, Direction::Minus)] + descend[lifted_index(top, Direction::Plus)],
    )
}
