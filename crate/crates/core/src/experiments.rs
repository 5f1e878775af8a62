//! Experiment schedules, parameter sweeps, windowed metrics and multi-seed
//! replication.
//!
//! A sweep is a grid of fully-specified [`WorldConfig`]s plus a repetition
//! count. Every cell gets its own seed derived from the sweep's base seed
//! via [`mix_seed`], so cells are independent, individually replayable and
//! may execute on any number of workers without changing the output.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::agent::PopulationInit;
use crate::game;
use crate::rng::mix_seed;
use crate::tuning::{TuningCriterion, TuningRule, DEFAULT_DELTA};
use crate::world::{run_with_window, ConfigError, WorldConfig};
use crate::Strategy;

/// Iteration count used by the full experiment schedules.
pub const FULL_RUN_ITERATIONS: u64 = 100_000;
/// Tail window used by the full experiment schedules.
pub const FULL_TAIL_WINDOW: usize = 5_000;

/// Tail window for a run: 5,000 ticks, scaled down to 10% of the
/// iteration count for desk-scale runs shorter than 50,000 iterations.
pub fn default_window(iterations: u64) -> usize {
    if iterations >= 50_000 {
        FULL_TAIL_WINDOW
    } else {
        ((iterations / 10) as usize).max(1)
    }
}

/// Per-run output: the cooperator-fraction series (one entry before the
/// first tick, then one per tick) and its windowed tail statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub series: Vec<f64>,
    /// Mean cooperator fraction over the final `window` series entries.
    pub tail_mean: f64,
    pub final_fraction: f64,
    /// Effective window used for `tail_mean`.
    pub window: usize,
}

impl RunMetrics {
    pub fn from_series(series: Vec<f64>, window: usize) -> Self {
        let window = window.max(1).min(series.len().max(1));
        let tail_mean = tail_mean_of(&series, window);
        let final_fraction = series.last().copied().unwrap_or(0.0);
        RunMetrics { series, tail_mean, final_fraction, window }
    }

    /// Tail mean over an arbitrary window (clamped to the series length).
    pub fn tail_mean_over(&self, window: usize) -> f64 {
        tail_mean_of(&self.series, window.max(1).min(self.series.len().max(1)))
    }
}

fn tail_mean_of(series: &[f64], window: usize) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let tail = &series[series.len() - window.min(series.len())..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// A sweep over the strategy's probability variable. The base config's
/// `spec.prob` is replaced by each grid value; its `seed` is the base seed
/// all cell seeds derive from.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: WorldConfig,
    pub x_lo: f64,
    pub x_hi: f64,
    pub x_step: f64,
    /// Seeds per grid point.
    pub repetitions: u32,
    /// Final ticks averaged into each cell's tail mean.
    pub window: usize,
}

impl SweepConfig {
    /// Sweep with the standard tail window for the base iteration count.
    pub fn new(base: WorldConfig, x_lo: f64, x_hi: f64, x_step: f64, repetitions: u32) -> Self {
        let window = default_window(base.iterations);
        SweepConfig { base, x_lo, x_hi, x_step, repetitions, window }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.x_lo >= 0.0 && self.x_lo <= self.x_hi && self.x_hi <= 1.0 && self.x_step > 0.0)
        {
            return Err(ConfigError::BadSweepRange {
                lo: self.x_lo,
                hi: self.x_hi,
                step: self.x_step,
            });
        }
        if self.base.spec.strategy == Strategy::DirectReciprocity && self.x_hi > 0.99 {
            return Err(ConfigError::SweepReachesContinuationOne(self.x_hi));
        }
        if self.repetitions == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        if self.window == 0 || self.window as u64 > self.base.iterations.max(1) {
            return Err(ConfigError::BadWindow {
                window: self.window,
                iterations: self.base.iterations,
            });
        }
        // Validate everything except the probability, which the grid
        // replaces.
        let mut probe = self.base.clone();
        probe.spec.prob = self.x_lo;
        probe.validate()
    }

    /// Grid points `x_lo, x_lo + step, ...` up to `x_hi`. Values are
    /// computed by index (not accumulated) and the last point snaps onto
    /// `x_hi` when it lands within 1e-9.
    pub fn x_grid(&self) -> Vec<f64> {
        grid(self.x_lo, self.x_hi, self.x_step)
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let x = lo + i as f64 * step;
            if (x - hi).abs() <= 1e-9 {
                hi
            } else {
                x
            }
        })
        .collect()
}

/// Whether a cell ran or was rejected by config validation.
#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    /// Validation or runtime failure, with the reason. Failed cells keep
    /// their place in the output so table shapes match the expansion.
    Failed(String),
}

impl CellStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, CellStatus::Ok)
    }
}

/// One executed (or rejected) sweep cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    /// Index into the expanded config list.
    pub cell_index: usize,
    pub repetition: u32,
    /// The derived per-cell seed actually used.
    pub seed: u64,
    /// The config as executed.
    pub config: WorldConfig,
    /// NaN when the cell failed.
    pub tail_mean: f64,
    /// NaN when the cell failed.
    pub final_fraction: f64,
    pub status: CellStatus,
}

/// Execute every `(config, repetition)` cell of a grid, in deterministic
/// order, optionally on a bounded worker pool. Cell `(i, r)` runs with
/// seed `mix_seed(base_seed, i, r)`; a `None` window means each cell uses
/// the standard window for its iteration count.
pub fn execute_grid(
    configs: &[WorldConfig],
    base_seed: u64,
    repetitions: u32,
    window: Option<usize>,
    jobs: Option<usize>,
) -> Vec<CellResult> {
    let tasks: Vec<(usize, u32)> = (0..configs.len())
        .flat_map(|cell| (0..repetitions).map(move |rep| (cell, rep)))
        .collect();

    let run_cell = |&(cell_index, repetition): &(usize, u32)| -> CellResult {
        let mut config = configs[cell_index].clone();
        config.seed = mix_seed(base_seed, cell_index as u64, u64::from(repetition));
        let window = window.unwrap_or_else(|| default_window(config.iterations));
        match run_with_window(&config, window) {
            Ok(metrics) => CellResult {
                cell_index,
                repetition,
                seed: config.seed,
                config,
                tail_mean: metrics.tail_mean,
                final_fraction: metrics.final_fraction,
                status: CellStatus::Ok,
            },
            Err(err) => CellResult {
                cell_index,
                repetition,
                seed: config.seed,
                config,
                tail_mean: f64::NAN,
                final_fraction: f64::NAN,
                status: CellStatus::Failed(err.to_string()),
            },
        }
    };

    match jobs {
        Some(1) => tasks.iter().map(run_cell).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(|| tasks.par_iter().map(run_cell).collect())
        }
        None => tasks.par_iter().map(run_cell).collect(),
    }
}

/// One grid point of a sweep: the per-seed cells plus their mean tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    /// Mean of `tail_mean` over the cells that ran; NaN when none did.
    pub mean_tail: f64,
    pub cells: Vec<CellResult>,
}

/// Run a sweep on the default worker pool.
pub fn run_sweep(sweep: &SweepConfig) -> Result<Vec<SweepRow>, ConfigError> {
    run_sweep_with_jobs(sweep, None)
}

/// Run a sweep with an explicit worker count (`Some(1)` forces sequential
/// execution). Output is sorted by x then repetition and does not depend
/// on the worker count.
pub fn run_sweep_with_jobs(
    sweep: &SweepConfig,
    jobs: Option<usize>,
) -> Result<Vec<SweepRow>, ConfigError> {
    sweep.validate()?;
    let xs = sweep.x_grid();
    let configs: Vec<WorldConfig> = xs
        .iter()
        .map(|&x| {
            let mut config = sweep.base.clone();
            config.spec.prob = x;
            config
        })
        .collect();
    let cells = execute_grid(&configs, sweep.base.seed, sweep.repetitions, Some(sweep.window), jobs);
    Ok(collect_rows(&xs, cells, sweep.repetitions))
}

fn collect_rows(xs: &[f64], cells: Vec<CellResult>, repetitions: u32) -> Vec<SweepRow> {
    let per_row = repetitions as usize;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let row_cells: Vec<CellResult> = cells[i * per_row..(i + 1) * per_row].to_vec();
            SweepRow { x, mean_tail: mean_tail(&row_cells), cells: row_cells }
        })
        .collect()
}

/// Mean tail over the cells that ran; NaN when none did.
pub fn mean_tail(cells: &[CellResult]) -> f64 {
    let ok: Vec<f64> = cells.iter().filter(|c| c.status.is_ok()).map(|c| c.tail_mean).collect();
    if ok.is_empty() {
        f64::NAN
    } else {
        ok.iter().sum::<f64>() / ok.len() as f64
    }
}

/// The six named experiment schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedExperiment {
    /// x scanned at 0.01 with the baseline population settings.
    PayoffTableBehavior,
    /// Both tuning criteria crossed with the x scan.
    TuningCriterion,
    /// Grid over initial cp of cooperators and defectors.
    InitialProbabilities,
    /// Grid over population size.
    Population,
    /// Grid over the initial proportion of cooperators.
    Robustness,
    /// Baseline curve, averaged over 10 seeds per x.
    Behavior,
}

impl NamedExperiment {
    pub const ALL: [NamedExperiment; 6] = [
        NamedExperiment::PayoffTableBehavior,
        NamedExperiment::TuningCriterion,
        NamedExperiment::InitialProbabilities,
        NamedExperiment::Population,
        NamedExperiment::Robustness,
        NamedExperiment::Behavior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedExperiment::PayoffTableBehavior => "payoff-table-behavior",
            NamedExperiment::TuningCriterion => "tuning-criterion",
            NamedExperiment::InitialProbabilities => "initial-probabilities",
            NamedExperiment::Population => "population",
            NamedExperiment::Robustness => "robustness",
            NamedExperiment::Behavior => "behavior",
        }
    }
}

impl fmt::Display for NamedExperiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("unknown experiment `{0}` (expected one of payoff-table-behavior, tuning-criterion, initial-probabilities, population, robustness, behavior)")]
pub struct ParseExperimentError(String);

impl FromStr for NamedExperiment {
    type Err = ParseExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase();
        NamedExperiment::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| ParseExperimentError(s.to_string()))
    }
}

/// A named experiment expanded to its full config grid. Configs carry a
/// placeholder seed of 0; execution derives per-cell seeds from the base
/// seed it is given.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub experiment: NamedExperiment,
    pub strategy: Strategy,
    pub configs: Vec<WorldConfig>,
    pub repetitions: u32,
}

impl ExperimentPlan {
    /// Execute the plan and fold the cells back into rows (one row per
    /// config, cells ordered by repetition).
    pub fn execute(
        &self,
        base_seed: u64,
        window: Option<usize>,
        jobs: Option<usize>,
    ) -> Vec<CellResult> {
        execute_grid(&self.configs, base_seed, self.repetitions, window, jobs)
    }
}

const BENEFIT: f64 = 4.0;
const COST: f64 = 2.0;
const X_LO: f64 = 0.01;

/// Parameter values carried forward between schedules for each strategy:
/// `(population, icpc, icpd, tuning criterion)`.
fn carried(strategy: Strategy) -> (usize, f64, f64, TuningCriterion) {
    match strategy {
        Strategy::KinSelection => (60, 0.65, 0.35, TuningCriterion::SelfishFitness),
        Strategy::DirectReciprocity => (20, 0.65, 0.35, TuningCriterion::SelfishProfit),
        Strategy::IndirectReciprocity => (60, 0.98, 0.45, TuningCriterion::SelfishProfit),
    }
}

/// Baseline population settings from the tuning-criterion schedule:
/// `(population, icpc, icpd)`.
fn baseline(strategy: Strategy) -> (usize, f64, f64) {
    match strategy {
        Strategy::KinSelection => (60, 0.65, 0.35),
        Strategy::DirectReciprocity => (20, 0.65, 0.35),
        Strategy::IndirectReciprocity => (60, 0.65, 0.35),
    }
}

fn x_hi(strategy: Strategy) -> f64 {
    // w = 1 is excluded for direct reciprocity: the reward entry diverges.
    if strategy == Strategy::DirectReciprocity {
        0.99
    } else {
        1.0
    }
}

/// Build a schedule cell. Deliberately bypasses constructor validation:
/// schedules reproduce their tables verbatim, and cells whose parameters
/// fail validation surface as failed rows at execution time instead of
/// being dropped.
#[allow(clippy::too_many_arguments)]
fn cell(
    strategy: Strategy,
    x: f64,
    population: usize,
    ipc: f64,
    icpc: f64,
    icpd: f64,
    criterion: TuningCriterion,
) -> WorldConfig {
    WorldConfig::new(
        game::GameSpec { strategy, benefit: BENEFIT, cost: COST, prob: x },
        TuningRule { criterion, delta: DEFAULT_DELTA },
        PopulationInit { population, ipc, icpc, icpd },
        0,
        FULL_RUN_ITERATIONS,
    )
}

/// Expand a named experiment for one strategy into the exact grid of its
/// schedule (x varies innermost, ascending).
pub fn expand_experiment(experiment: NamedExperiment, strategy: Strategy) -> ExperimentPlan {
    let hi = x_hi(strategy);
    let mut configs = Vec::new();
    let mut repetitions = 1;

    match experiment {
        NamedExperiment::PayoffTableBehavior => {
            let (population, icpc, icpd) = baseline(strategy);
            let (_, _, _, criterion) = carried(strategy);
            for x in grid(X_LO, hi, 0.01) {
                configs.push(cell(strategy, x, population, 0.5, icpc, icpd, criterion));
            }
        }
        NamedExperiment::TuningCriterion => {
            let (population, icpc, icpd) = baseline(strategy);
            let step = if strategy == Strategy::IndirectReciprocity { 0.02 } else { 0.01 };
            for criterion in [TuningCriterion::SelfishFitness, TuningCriterion::SelfishProfit] {
                for x in grid(X_LO, hi, step) {
                    configs.push(cell(strategy, x, population, 0.5, icpc, icpd, criterion));
                }
            }
        }
        NamedExperiment::InitialProbabilities => {
            let (population, _, _) = baseline(strategy);
            let (_, _, _, criterion) = carried(strategy);
            let (icpc_list, icpd_list): (&[f64], &[f64]) = match strategy {
                Strategy::IndirectReciprocity => (
                    &[0.5, 0.51, 0.55, 0.65, 0.75, 0.85, 0.95, 0.99],
                    &[0.01, 0.05, 0.15, 0.25, 0.35, 0.45, 0.49, 0.5],
                ),
                _ => (&[0.65, 0.75, 0.85, 0.95, 0.99], &[0.01, 0.05, 0.15, 0.25, 0.35]),
            };
            for &icpc in icpc_list {
                for &icpd in icpd_list {
                    for x in grid(X_LO, hi, 0.05) {
                        configs.push(cell(strategy, x, population, 0.5, icpc, icpd, criterion));
                    }
                }
            }
        }
        NamedExperiment::Population => {
            let (_, icpc, icpd, criterion) = carried(strategy);
            let populations: &[usize] = match strategy {
                Strategy::DirectReciprocity => {
                    &[2, 4, 6, 8, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100]
                }
                _ => &[10, 20, 30, 40, 50, 60, 70, 80, 90, 100],
            };
            for &population in populations {
                for x in grid(X_LO, hi, 0.04) {
                    configs.push(cell(strategy, x, population, 0.5, icpc, icpd, criterion));
                }
            }
        }
        NamedExperiment::Robustness => {
            let (population, icpc, icpd, criterion) = carried(strategy);
            for ipc in [0.0, 0.333, 0.5, 0.666, 1.0] {
                for x in grid(X_LO, hi, 0.02) {
                    configs.push(cell(strategy, x, population, ipc, icpc, icpd, criterion));
                }
            }
        }
        NamedExperiment::Behavior => {
            let (population, icpc, icpd, criterion) = carried(strategy);
            let ipc = if strategy == Strategy::DirectReciprocity { 1.0 } else { 0.5 };
            for x in grid(X_LO, hi, 0.02) {
                configs.push(cell(strategy, x, population, ipc, icpc, icpd, criterion));
            }
            repetitions = 10;
        }
    }

    ExperimentPlan { experiment, strategy, configs, repetitions }
}

/// Tail means of one initial-proportion probe.
#[derive(Clone, Debug, PartialEq)]
pub struct RegimeProbe {
    pub ipc: f64,
    pub per_seed: Vec<f64>,
    pub mean_tail: f64,
}

/// Probe cooperation survival from three starting shares of cooperators
/// (2/3, 1/2 and 1/3 of the population), reporting tail means side by
/// side. Population, initial cps and everything else follow the
/// strategy's carried-forward settings.
#[allow(clippy::too_many_arguments)]
pub fn regime_experiment(
    strategy: Strategy,
    benefit: f64,
    cost: f64,
    x: f64,
    tuning: TuningRule,
    base_seed: u64,
    repetitions: u32,
    iterations: u64,
) -> Result<[RegimeProbe; 3], ConfigError> {
    let (population, icpc, icpd, _) = carried(strategy);
    let probes = [2.0 / 3.0, 0.5, 1.0 / 3.0];
    let mut results = Vec::with_capacity(3);
    for (probe_index, &ipc) in probes.iter().enumerate() {
        let spec = game::GameSpec::new(strategy, benefit, cost, x)?;
        let init = PopulationInit::new(population, ipc, icpc, icpd)?;
        let config = WorldConfig::new(spec, tuning, init, 0, iterations);
        let window = default_window(iterations);
        let per_seed: Vec<f64> = (0..repetitions)
            .map(|rep| {
                let mut seeded = config.clone();
                seeded.seed = mix_seed(base_seed, probe_index as u64, u64::from(rep));
                run_with_window(&seeded, window).map(|m| m.tail_mean)
            })
            .collect::<Result<_, _>>()?;
        let mean_tail = per_seed.iter().sum::<f64>() / per_seed.len().max(1) as f64;
        results.push(RegimeProbe { ipc, per_seed, mean_tail });
    }
    Ok(results.try_into().expect("exactly three probes"))
}
