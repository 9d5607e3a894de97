//! Command-line front end. Errors are reported as a single JSON line on
//! stderr and a nonzero exit status.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lifted_tempering::chain::ChainParams;
use lifted_tempering::harness::{
    self, curves, fit_sweep_csv, linspace, open_output, optimal_report, oracle_rows, run_sweep,
    sweep, volatility_report, write_curves, write_oracle_csv, write_plot_script, write_sweep_csv,
    CEffective, FileConfig, SweepConfig,
};
use lifted_tempering::scaling::Mode;
use lifted_tempering::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "lifted-tempering", version, about = "Lifted vs. reversible tempering: theory, simulation and round-trip oracle")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// TOML file with default values; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Acceptance scale constant in acc = 2Φ(-cℓ/2)
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Dimension of the Gaussian target
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Hottest inverse temperature of the ladder
    #[arg(long = "beta-min", global = true)]
    beta_min: Option<f64>,
    /// Iterations (or steps per replicate for `volatility`)
    #[arg(long, global = true)]
    iters: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// rev, nonrev or both
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Acceptance grid: a point count, or a comma-separated list of values
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare the simulated lifted-chain volatility with its closed form
    Volatility {
        /// Transition probabilities A,B,C
        #[arg(long, value_name = "A,B,C")]
        params: Option<String>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Optimal spacing, acceptance rate and efficiency for both modes
    Optimal,
    /// Efficiency curves over an acceptance grid, as CSV plus a plot script
    Curves,
    /// Simulated round-trip rates over an acceptance grid
    Sweep,
    /// A single sweep point
    Run {
        #[arg(long = "target-acc")]
        target_acc: Option<f64>,
    },
    /// Exact round-trip rates from the hitting-time equations
    Oracle,
    /// Fit one scale constant per mode to a sweep CSV
    Fit {
        /// Sweep CSV to fit
        input: PathBuf,
        /// `fit`, or a value; defaults to the ladder-midpoint Gaussian value
        #[arg(long = "c-effective")]
        c_effective: Option<String>,
    },
}

/// Flags first, then the config file, then the built-in default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

struct Settings {
    flags: Common,
    file: FileConfig,
}

impl Settings {
    fn c(&self) -> f64 {
        pick(self.flags.c, self.file.c, 1.0)
    }
    fn d(&self) -> usize {
        pick(self.flags.d, self.file.d, 100)
    }
    fn beta_min(&self) -> f64 {
        pick(self.flags.beta_min, self.file.beta_min, 0.1)
    }
    fn iters(&self, default: u64) -> u64 {
        pick(self.flags.iters, self.file.iters, default)
    }
    fn seed(&self) -> u64 {
        pick(self.flags.seed, self.file.seed, 0)
    }
    fn out(&self) -> Option<PathBuf> {
        self.flags.out.clone().or_else(|| self.file.out.as_ref().map(PathBuf::from))
    }

    fn modes(&self) -> Result<Vec<Mode>> {
        let raw = self.flags.mode.as_deref().or(self.file.mode.as_deref()).unwrap_or("both");
        if raw.eq_ignore_ascii_case("both") {
            Ok(Mode::BOTH.to_vec())
        } else {
            Ok(vec![raw.parse()?])
        }
    }

    /// `--grid` (count or list) beats the file's `grid`, which beats its
    /// `grid_size`; the fallback is `n` points spanning `range`.
    fn grid(&self, n: usize, range: (f64, f64)) -> Result<Vec<f64>> {
        let grid = match &self.flags.grid {
            Some(g) => parse_grid(g, range)?,
            None => match (&self.file.grid, self.file.grid_size) {
                (Some(g), _) => g.clone(),
                (None, Some(k)) => linspace(range.0, range.1, k),
                (None, None) => linspace(range.0, range.1, n),
            },
        };
        harness::validate_grid(&grid)?;
        Ok(grid)
    }

    fn workers(&self) -> Result<usize> {
        self.file.workers()
    }
}

fn parse_grid(s: &str, range: (f64, f64)) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Ok(n) = s.parse::<usize>() {
        return Ok(linspace(range.0, range.1, n));
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid("grid", v.trim(), "expected a point count or comma-separated numbers"))
        })
        .collect()
}

fn parse_params(s: &str) -> Result<ChainParams> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|_| Error::invalid("params", s, "expected three numbers A,B,C"))?;
    match v[..] {
        [a, b, c] => ChainParams::new(a, b, c),
        _ => Err(Error::invalid("params", s, "expected three numbers A,B,C")),
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Malformed(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let s = Settings { flags: cli.common, file };
    match cli.command {
        Command::Volatility { params, replicates } => {
            let raw = params
                .or_else(|| s.file.params.clone())
                .ok_or_else(|| Error::invalid("params", "", "--params A,B,C is required"))?;
            let p = parse_params(&raw)?;
            let replicates = pick(replicates, s.file.replicates, 100);
            let pool = harness::worker_pool(s.workers()?)?;
            let report = pool.install(|| volatility_report(&p, s.iters(1_000_000), replicates, s.seed()))?;
            print!("{report}");
            if let Some(out) = s.out() {
                write_json(&report, &out)?;
            }
        }
        Command::Optimal => {
            let report = optimal_report(s.c())?;
            print!("{report}");
            if let Some(out) = s.out() {
                write_json(&report, &out)?;
            }
        }
        Command::Curves => {
            let c = s.c();
            let grid = s.grid(curves::DEFAULT_GRID_POINTS, curves::DEFAULT_GRID_RANGE)?;
            let rows = harness::curve_rows(c, &grid)?;
            let out = s.out();
            write_curves(&rows, open_output(out.as_deref())?)?;
            if let Some(path) = out {
                let opt = optimal_report(c)?;
                let script = path.with_extension("py");
                write_plot_script(&script, &path, &opt.reversible, &opt.nonreversible)?;
            }
        }
        Command::Sweep => {
            let cfg = SweepConfig {
                d: s.d(),
                beta_min: s.beta_min(),
                grid: s.grid(sweep::DEFAULT_GRID_POINTS, sweep::DEFAULT_GRID_RANGE)?,
                iterations: s.iters(sweep::DEFAULT_ITERATIONS),
                modes: s.modes()?,
                seed: s.seed(),
                workers: s.workers()?,
            };
            let rows = run_sweep(&cfg)?;
            write_sweep_csv(&rows, open_output(s.out().as_deref())?)?;
        }
        Command::Run { target_acc } => {
            let target = target_acc
                .or(s.file.target_acc)
                .ok_or_else(|| Error::invalid("target_acc", "", "--target-acc is required"))?;
            let cfg = SweepConfig {
                d: s.d(),
                beta_min: s.beta_min(),
                grid: vec![target],
                iterations: s.iters(10_000_000),
                modes: s.modes()?,
                seed: s.seed(),
                workers: s.workers()?,
            };
            let rows = run_sweep(&cfg)?;
            write_sweep_csv(&rows, open_output(s.out().as_deref())?)?;
        }
        Command::Oracle => {
            let grid = s.grid(sweep::DEFAULT_GRID_POINTS, sweep::DEFAULT_GRID_RANGE)?;
            let rows = oracle_rows(s.d(), s.beta_min(), &grid, &s.modes()?)?;
            write_oracle_csv(&rows, open_output(s.out().as_deref())?)?;
        }
        Command::Fit { input, c_effective } => {
            let c = match c_effective {
                Some(v) => v.parse()?,
                None => CEffective::ladder_midpoint(s.beta_min())?,
            };
            let fits = fit_sweep_csv(&input, c)?;
            println!("{:<14} {:>6} {:>14} {:>11} {:>10} {:>10}", "mode", "points", "scale", "max_rel_dev", "argmax_sim", "argmax_th");
            for f in &fits {
                println!(
                    "{:<14} {:>6} {:>14.6e} {:>11.4} {:>10.4} {:>10.4}",
                    f.mode.as_str(),
                    f.points,
                    f.scale,
                    f.max_rel_dev,
                    f.argmax_acc_sim,
                    f.argmax_acc_theory
                );
            }
            if let [rev, non] = &fits[..] {
                println!("scale ratio (nonreversible / reversible) {:.4}", non.scale / rev.scale);
            }
            if let Some(out) = s.out() {
                write_json(&fits, &out)?;
            }
        }
    }
    Ok(())
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_line("usage", e.to_string().lines().next().unwrap_or("")));
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            if matches!(e, Error::InvalidParams(_) | Error::InvalidArgument { .. }) {
                eprintln!("see `lifted-tempering --help` for usage");
            }
            ExitCode::FAILURE
        }
    }
}
