//! Simulated tempering on a product of `d` standard normals.
//!
//! Within-level mixing is taken to be instantaneous: every iteration draws
//! a fresh point from the current tempered distribution before proposing a
//! level move. For the Gaussian target the acceptance ratio depends on the
//! point only through `S = Σ xᵢ²`, and under inverse temperature `β`,
//! `S ~ χ²_d / β`, so the state is `(level, direction, S)` and one
//! iteration costs a single gamma draw.
//!
//! Boundary handling: a proposal outside `[0, N]` is rejected. The
//! reversible chain holds; the lifted chain reverses its direction, exactly
//! as it does on an ordinary rejection.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::chain::Direction;
use crate::error::{Error, Result};
use crate::normal::normal_quantile;
use crate::rng::{self, StreamRng};
use crate::scaling::Mode;

/// Upper bound on ladder size accepted by [`build_ladder`].
pub const MAX_LEVELS: usize = 1_000_000;

/// Inverse temperatures `1 = β₀ > β₁ > … > β_N > 0`, `N ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    betas: Vec<f64>,
}

impl Ladder {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.len() < 2 {
            return Err(Error::InvalidLadder(format!("need at least 2 levels, got {}", betas.len())));
        }
        if betas[0] != 1.0 {
            return Err(Error::InvalidLadder(format!("first inverse temperature is {}, not 1", betas[0])));
        }
        if let Some(w) = betas.windows(2).find(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidLadder(format!("not strictly decreasing at {} -> {}", w[0], w[1])));
        }
        let last = betas[betas.len() - 1];
        if !(last > 0.0) {
            return Err(Error::InvalidLadder(format!("hottest inverse temperature {last} must be positive")));
        }
        Ok(Self { betas })
    }

    /// `levels + 1` inverse temperatures `β_k = beta_min^(k/levels)`.
    pub fn geometric(beta_min: f64, levels: usize) -> Result<Self> {
        if !(beta_min > 0.0 && beta_min < 1.0) {
            return Err(Error::invalid("beta_min", beta_min, "must lie in (0, 1)"));
        }
        if levels == 0 {
            return Err(Error::invalid("levels", levels, "must be at least 1"));
        }
        let mut betas: Vec<f64> = (0..=levels)
            .map(|k| beta_min.powf(k as f64 / levels as f64))
            .collect();
        betas[0] = 1.0;
        betas[levels] = beta_min;
        Self::new(betas)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Index of the hottest level, `N`.
    pub fn top(&self) -> usize {
        self.betas.len() - 1
    }

    /// Number of inverse temperatures, `N + 1`.
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn beta(&self, level: usize) -> f64 {
        self.betas[level]
    }
}

/// The spacing constant `u = −2√2·Φ⁻¹(a/2)`: adjacent levels with
/// `log(β/β') = u/√d` are accepted with probability `a` as `d → ∞`.
pub fn spacing_constant(target_acc: f64) -> Result<f64> {
    if !(target_acc > 0.0 && target_acc < 1.0) {
        return Err(Error::invalid("target_acc", target_acc, "must lie in (0, 1)"));
    }
    Ok(-2.0 * std::f64::consts::SQRT_2 * normal_quantile(target_acc / 2.0)?)
}

/// Geometric ladder from 1 down to `beta_min` whose adjacent-swap
/// acceptance tends to `target_acc` for large `d`.
///
/// The nominal ratio is `r = exp(−u/√d)`. The ladder uses the smallest `N`
/// with `r^N ≤ beta_min` and then spreads the ratio evenly so that
/// `β_N = beta_min` exactly; all adjacent ratios are equal.
pub fn build_ladder(beta_min: f64, target_acc: f64, d: usize) -> Result<Ladder> {
    if !(beta_min > 0.0 && beta_min < 1.0) {
        return Err(Error::invalid("beta_min", beta_min, "must lie in (0, 1)"));
    }
    if d == 0 {
        return Err(Error::invalid("d", d, "must be at least 1"));
    }
    let u = spacing_constant(target_acc)?;
    let log_step = u / (d as f64).sqrt();
    if (-log_step).exp() >= 1.0 - 1e-12 {
        return Err(Error::invalid("target_acc", target_acc, "too close to 1: ladder would not terminate"));
    }
    let levels = ((-beta_min.ln()) / log_step).ceil().max(1.0);
    if levels > MAX_LEVELS as f64 {
        return Err(Error::invalid("target_acc", target_acc, "ladder would exceed the level limit"));
    }
    Ladder::geometric(beta_min, levels as usize)
}

/// Log acceptance ratio for moving the inverse temperature from `beta_from`
/// to `beta_to` at fixed `x` with `S = Σxᵢ² = s`, using the exact Gaussian
/// normalizing constants: `−(β′−β)·s/2 + (d/2)·log(β′/β)`.
pub fn swap_log_ratio(beta_from: f64, beta_to: f64, s: f64, d: usize) -> Result<f64> {
    for (name, b) in [("beta_from", beta_from), ("beta_to", beta_to)] {
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::invalid(name, b, "must lie in (0, 1]"));
        }
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("s", s, "must be positive"));
    }
    if d == 0 {
        return Err(Error::invalid("d", d, "must be at least 1"));
    }
    Ok(log_ratio(beta_from, beta_to, s, d as f64))
}

#[inline]
fn log_ratio(beta_from: f64, beta_to: f64, s: f64, d: f64) -> f64 {
    -(beta_to - beta_from) * s / 2.0 + 0.5 * d * (beta_to / beta_from).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperConfig {
    pub d: usize,
    pub ladder: Ladder,
    pub mode: Mode,
    pub iterations: u64,
    pub seed: u64,
}

impl TemperConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("d", self.d, "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", self.iterations, "must be at least 1"));
        }
        Ok(())
    }
}

/// Current level, direction (`Plus` means towards hotter, i.e. increasing
/// level index) and the squared norm of the current point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperState {
    pub level: usize,
    pub dir: Direction,
    pub s: f64,
}

/// What happened to the level proposal in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted { from: usize, to: usize },
    Rejected,
    /// The proposal left `[0, N]`.
    OutOfRange,
}

/// A running simulated-tempering chain.
pub struct TemperingChain {
    ladder: Ladder,
    mode: Mode,
    d: f64,
    samplers: Vec<Gamma<f64>>,
    state: TemperState,
    rng: StreamRng,
}

impl TemperingChain {
    /// Starts at the cold level with direction `Plus`.
    pub fn new(config: &TemperConfig) -> Result<Self> {
        Self::with_start(config, 0, Direction::Plus)
    }

    pub fn with_start(config: &TemperConfig, level: usize, dir: Direction) -> Result<Self> {
        config.validate()?;
        if level > config.ladder.top() {
            return Err(Error::invalid("level", level, "outside the ladder"));
        }
        let shape = config.d as f64 / 2.0;
        let samplers = config
            .ladder
            .betas()
            .iter()
            .map(|&b| Gamma::new(shape, 2.0 / b).expect("positive shape and scale"))
            .collect::<Vec<_>>();
        let mut rng = rng::stream(config.seed, 0);
        let s = samplers[level].sample(&mut rng);
        Ok(Self {
            ladder: config.ladder.clone(),
            mode: config.mode,
            d: config.d as f64,
            samplers,
            state: TemperState { level, dir, s },
            rng,
        })
    }

    pub fn state(&self) -> TemperState {
        self.state
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    /// Resample `S` at the current level, then propose and accept or
    /// reject a level move.
    pub fn step(&mut self) -> StepOutcome {
        let level = self.state.level;
        let s = self.samplers[level].sample(&mut self.rng);
        self.state.s = s;
        let upward = match self.mode {
            Mode::Reversible => self.rng.random::<bool>(),
            Mode::Nonreversible => self.state.dir == Direction::Plus,
        };
        let target = if upward {
            (level < self.ladder.top()).then_some(level + 1)
        } else {
            level.checked_sub(1)
        };
        let Some(to) = target else {
            self.reverse();
            return StepOutcome::OutOfRange;
        };
        let lr = log_ratio(self.ladder.beta(level), self.ladder.beta(to), s, self.d);
        if lr >= 0.0 || self.rng.random::<f64>() < lr.exp() {
            self.state.level = to;
            StepOutcome::Accepted { from: level, to }
        } else {
            self.reverse();
            StepOutcome::Rejected
        }
    }

    fn reverse(&mut self) {
        if self.mode == Mode::Nonreversible {
            self.state.dir = self.state.dir.flipped();
        }
    }
}

/// Counts `0 → N → 0` excursions of the level process.
#[derive(Debug, Clone, Copy, Default)]
pub struct RoundTripCounter {
    phase: Phase,
    count: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
enum Phase {
    #[default]
    Unstarted,
    SeekingHot,
    SeekingCold,
}

impl RoundTripCounter {
    pub fn observe(&mut self, level: usize, top: usize) {
        match (self.phase, level) {
            (Phase::Unstarted, 0) => self.phase = Phase::SeekingHot,
            (Phase::SeekingHot, l) if l == top => self.phase = Phase::SeekingCold,
            (Phase::SeekingCold, 0) => {
                self.count += 1;
                self.phase = Phase::SeekingHot;
            }
            _ => {}
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripStats {
    pub round_trips: u64,
    pub iterations: u64,
    pub rate_per_million: f64,
    /// Every iteration proposes a move, including out-of-range ones.
    pub proposals: u64,
    pub acceptances: u64,
    pub empirical_acc: f64,
}

impl RoundTripStats {
    fn new(round_trips: u64, iterations: u64, acceptances: u64) -> Self {
        Self {
            round_trips,
            iterations,
            rate_per_million: round_trips as f64 / (iterations as f64 / 1e6),
            proposals: iterations,
            acceptances,
            empirical_acc: acceptances as f64 / iterations as f64,
        }
    }

    /// Poisson standard error of `rate_per_million` from the round-trip count.
    pub fn rate_std_err_per_million(&self) -> f64 {
        (self.round_trips as f64).sqrt() / (self.iterations as f64 / 1e6)
    }
}

/// Runs the chain for `config.iterations` iterations from the cold level.
pub fn run(config: &TemperConfig) -> Result<RoundTripStats> {
    let mut chain = TemperingChain::new(config)?;
    let top = config.ladder.top();
    let mut counter = RoundTripCounter::default();
    counter.observe(0, top);
    let mut accepted = 0u64;
    for _ in 0..config.iterations {
        if let StepOutcome::Accepted { .. } = chain.step() {
            accepted += 1;
        }
        counter.observe(chain.state.level, top);
    }
    Ok(RoundTripStats::new(counter.count(), config.iterations, accepted))
}

/// Empirical acceptance rate of a run of `iterations` iterations, without
/// round-trip bookkeeping.
pub fn measure_acceptance(config: &TemperConfig, iterations: u64) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::invalid("iterations", iterations, "must be at least 1"));
    }
    let mut chain = TemperingChain::new(config)?;
    let accepted = (0..iterations)
        .filter(|_| matches!(chain.step(), StepOutcome::Accepted { .. }))
        .count();
    Ok(accepted as f64 / iterations as f64)
}
