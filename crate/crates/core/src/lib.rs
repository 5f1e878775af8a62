//! Agent-based simulation of the cultural evolution of cooperation.
//!
//! The crate has two layers:
//!
//! * an analytic layer ([`game`], [`tuning`]) that is generic over the
//!   floating-point scalar via [`scalar::Scalar`]: payoff matrices,
//!   cooperation thresholds, game classification and the cp-update rules;
//! * a simulation layer ([`agent`], [`play`], [`world`], [`experiments`])
//!   that runs populations of agents on a continuous torus. The simulation
//!   layer is pinned to `f64` so that a `(config, seed)` pair replays to
//!   bit-identical results.
//!
//! Concrete `f64` aliases for the analytic types live at the crate root.

pub mod agent;
pub mod experiments;
pub mod game;
pub mod play;
pub mod rng;
pub mod scalar;
pub mod tuning;
pub mod world;

pub use agent::{classify_agent, init_population, Agent, AgentId, PopulationInit, Role};
pub use experiments::{
    expand_experiment, regime_experiment, run_sweep, CellResult, CellStatus, ExperimentPlan,
    NamedExperiment, RegimeProbe, RunMetrics, SweepConfig, SweepRow,
};
pub use game::{GameClass, GameError, Regime, Strategy};
pub use rng::{mix_seed, SimRng};
pub use tuning::{TuningCriterion, TuningRule};
pub use world::{run, run_with_window, ConfigError, Matching, WorldConfig, WorldState};

/// Game parameters at the scalar type used by the simulation layer.
pub type GameSpec = game::GameSpec<f64>;
/// Payoff matrix at the scalar type used by the simulation layer.
pub type PayoffMatrix = game::PayoffMatrix<f64>;
/// Threshold triple at the scalar type used by the simulation layer.
pub type Thresholds = game::Thresholds<f64>;

/// `thresholds` at the scalar type used by the simulation layer.
pub fn thresholds(
    strategy: Strategy,
    benefit: f64,
    cost: f64,
) -> Result<Thresholds, game::GameError> {
    game::thresholds(strategy, benefit, cost)
}
