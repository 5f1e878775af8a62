//! Command-line front end: analytic queries (`thresholds`, `classify`),
//! single runs (`run`) and experiment sweeps (`sweep`).

mod config;
mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coopsim_core::experiments::{
    default_window, expand_experiment, run_sweep_with_jobs, CellResult, NamedExperiment,
};
use coopsim_core::game::{self, GameError};
use coopsim_core::scalar::ties;
use coopsim_core::world::run_with_window;
use coopsim_core::{PayoffMatrix, Strategy};

use config::ConfigFile;

/// CLI failure with its exit code: 2 for configuration errors, 3 for
/// runtime errors.
#[derive(Debug)]
pub struct CliError {
    message: String,
    runtime: bool,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { message: message.into(), runtime: false }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError { message: message.into(), runtime: true }
    }

    fn exit_code(&self) -> u8 {
        if self.runtime {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Parser)]
#[command(
    name = "coopsim",
    version,
    about = "Simulate the cultural evolution of cooperation under kin selection, \
             direct reciprocity and indirect reciprocity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the x values where cooperation becomes evolutionarily stable,
    /// risk-dominant and advantageous
    Thresholds {
        /// KS, DR or IR
        strategy: String,
        /// Benefit handed to the partner by a cooperator
        b: f64,
        /// Cost paid by a cooperator
        c: f64,
    },
    /// Print the payoff matrix and game classification for one parameter set
    Classify {
        /// KS, DR or IR
        strategy: String,
        b: f64,
        c: f64,
        /// The strategy's probability variable (r, w or q)
        x: f64,
    },
    /// Run one simulation from a config file and write the per-tick series CSV
    Run {
        config: PathBuf,
        output: PathBuf,
        /// Overrides [run] seed and COOPSIM_SEED
        #[arg(long)]
        seed: Option<u64>,
        /// Tail window; defaults to [run] window, then to the standard rule
        #[arg(long)]
        window: Option<usize>,
    },
    /// Run an experiment schedule (`sweep <EXPERIMENT> <STRATEGY> <OUT>`) or
    /// a sweep config file (`sweep <CONFIG> <OUT>`) and write the results CSV
    Sweep {
        /// Experiment name (payoff-table-behavior, tuning-criterion,
        /// initial-probabilities, population, robustness, behavior) or a
        /// config file path
        target: String,
        /// `<STRATEGY> <OUTPUT>` after an experiment name, `<OUTPUT>` after
        /// a config path
        #[arg(num_args = 1..=2, required = true)]
        rest: Vec<String>,
        /// Base seed; per-cell seeds derive from it
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for cell execution (output is identical for any
        /// value)
        #[arg(long)]
        jobs: Option<usize>,
        /// Tail window applied to every cell
        #[arg(long)]
        window: Option<usize>,
        /// Override the schedule's per-run iteration count
        #[arg(long)]
        iterations: Option<u64>,
        /// Also write a two-column x-vs-mean file here
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Thresholds { strategy, b, c } => cmd_thresholds(&strategy, b, c),
        Command::Classify { strategy, b, c, x } => cmd_classify(&strategy, b, c, x),
        Command::Run { config, output, seed, window } => cmd_run(&config, &output, seed, window),
        Command::Sweep { target, rest, seed, jobs, window, iterations, plot_data } => {
            cmd_sweep(&target, &rest, seed, jobs, window, iterations, plot_data.as_deref())
        }
    }
}

fn parse_strategy(arg: &str) -> Result<Strategy, CliError> {
    arg.parse().map_err(|err: GameError| CliError::config(format!("strategy: {err}")))
}

fn resolve_seed(flag: Option<u64>, config_seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag.or(config_seed) {
        return Ok(seed);
    }
    match std::env::var("COOPSIM_SEED") {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("COOPSIM_SEED: not a valid seed (got `{value}`)"))),
        Err(_) => Ok(0),
    }
}

fn resolve_jobs(jobs: Option<usize>) -> Result<Option<usize>, CliError> {
    if jobs == Some(0) {
        return Err(CliError::config("--jobs: must be at least 1"));
    }
    Ok(jobs)
}

fn cmd_thresholds(strategy_arg: &str, b: f64, c: f64) -> Result<(), CliError> {
    let strategy = parse_strategy(strategy_arg)?;
    match coopsim_core::thresholds(strategy, b, c) {
        Ok(th) => {
            println!("strategy: {strategy} (b={b}, c={c})");
            println!("ess: {}", th.ess);
            println!("rd: {}", th.rd);
            println!("ad: {}", th.ad);
            Ok(())
        }
        Err(GameError::UnreachableThresholds { ratio, ess, rd, ad }) => {
            Err(CliError::config(format!(
                "thresholds unreachable for b/c = {ratio}: \
                 ess requires x = {ess}, rd requires x = {rd}, ad requires x = {ad}; \
                 no probability can exceed 1"
            )))
        }
        Err(err) => Err(CliError::config(err.to_string())),
    }
}

fn tie_annotation(m: &PayoffMatrix) -> String {
    let entries =
        [("R", m.reward), ("S", m.sucker), ("T", m.temptation), ("P", m.punishment)];
    let mut tied = Vec::new();
    for (i, &(name_a, a)) in entries.iter().enumerate() {
        for &(name_b, b) in entries.iter().skip(i + 1) {
            if ties(a, b) {
                tied.push(format!("{name_a}={name_b}"));
            }
        }
    }
    if tied.is_empty() {
        String::new()
    } else {
        format!(" ({})", tied.join(", "))
    }
}

fn cmd_classify(strategy_arg: &str, b: f64, c: f64, x: f64) -> Result<(), CliError> {
    let strategy = parse_strategy(strategy_arg)?;
    let spec = game::GameSpec::new(strategy, b, c, x)
        .map_err(|err| CliError::config(err.to_string()))?;
    let matrix = spec.payoff_matrix();
    println!("strategy: {strategy} (b={b}, c={c}, x={x})");
    println!("R: {}", matrix.reward);
    println!("S: {}", matrix.sucker);
    println!("T: {}", matrix.temptation);
    println!("P: {}", matrix.punishment);
    println!("class: {}{}", spec.classify(), tie_annotation(&matrix));
    match spec.regime() {
        Some(regime) => println!("regime: {regime}"),
        None => println!("regime: none"),
    }
    Ok(())
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|err| CliError::config(format!("{}: {err}", path.display())))?;
    ConfigFile::parse(&text)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|err| CliError::runtime(format!("{}: {err}", path.display())))
}

fn cmd_run(
    config_path: &Path,
    output: &Path,
    seed_flag: Option<u64>,
    window_flag: Option<usize>,
) -> Result<(), CliError> {
    let file = read_config(config_path)?;
    let seed = resolve_seed(seed_flag, file.run.seed)?;
    let world = file.to_world_config(seed)?;
    let window = file.run_window(window_flag);
    let metrics =
        run_with_window(&world, window).map_err(|err| CliError::config(err.to_string()))?;
    write_file(output, &output::series_csv(&metrics, world.iterations, seed))?;
    println!(
        "wrote {} series rows to {} (tail_mean={})",
        metrics.series.len(),
        output.display(),
        metrics.tail_mean,
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    target: &str,
    rest: &[String],
    seed_flag: Option<u64>,
    jobs: Option<usize>,
    window_flag: Option<usize>,
    iterations_flag: Option<u64>,
    plot_path: Option<&Path>,
) -> Result<(), CliError> {
    let jobs = resolve_jobs(jobs)?;
    let named: Option<NamedExperiment> = target.parse().ok();
    match (named, rest) {
        (Some(experiment), [strategy_arg, output]) => {
            let strategy = parse_strategy(strategy_arg)?;
            let mut plan = expand_experiment(experiment, strategy);
            if let Some(iterations) = iterations_flag {
                for config in &mut plan.configs {
                    config.iterations = iterations;
                }
            }
            let seed = resolve_seed(seed_flag, None)?;
            let cells = plan.execute(seed, window_flag, jobs);
            let iterations = plan.configs[0].iterations;
            let window = window_flag.unwrap_or_else(|| default_window(iterations));
            let header = format!(
                "# experiment={experiment} strategy={strategy} base_seed={seed} \
                 repetitions={} iterations={iterations} window={window}\n",
                plan.repetitions,
            );
            write_file(Path::new(output), &output::experiment_csv(&cells, &header))?;
            finish_sweep(&cells, Path::new(output), plot_path)
        }
        (Some(experiment), _) => Err(CliError::config(format!(
            "experiment `{experiment}` needs a strategy and an output path: \
             sweep {experiment} <STRATEGY> <OUTPUT>"
        ))),
        (None, [output]) => {
            let mut file = read_config(Path::new(target))?;
            if let Some(iterations) = iterations_flag {
                file.run.iterations = iterations;
            }
            let seed = resolve_seed(seed_flag, file.run.seed)?;
            let sweep = file.to_sweep_config(seed, window_flag)?;
            let rows = run_sweep_with_jobs(&sweep, jobs)
                .map_err(|err| CliError::config(err.to_string()))?;
            let cells: Vec<CellResult> =
                rows.into_iter().flat_map(|row| row.cells.into_iter()).collect();
            let header = format!(
                "# sweep strategy={} x_lo={} x_hi={} x_step={} base_seed={seed} \
                 repetitions={} iterations={} window={}\n",
                sweep.base.spec.strategy,
                sweep.x_lo,
                sweep.x_hi,
                sweep.x_step,
                sweep.repetitions,
                sweep.base.iterations,
                sweep.window,
            );
            write_file(Path::new(output), &output::sweep_csv(&cells, &header))?;
            finish_sweep(&cells, Path::new(output), plot_path)
        }
        (None, _) => Err(CliError::config(format!(
            "`{target}` is not an experiment name, so it must be a config file \
             followed by one output path: sweep <CONFIG> <OUTPUT>"
        ))),
    }
}

fn finish_sweep(
    cells: &[CellResult],
    output: &Path,
    plot_path: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(plot) = plot_path {
        write_file(plot, &output::plot_data(cells))?;
    }
    let failed = cells.iter().filter(|cell| !cell.status.is_ok()).count();
    println!(
        "wrote {} cells to {} ({} failed)",
        cells.len(),
        output.display(),
        failed,
    );
    Ok(())
}
