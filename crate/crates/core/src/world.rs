//! The spatial simulation loop: movement on the torus, neighbor matching,
//! game play and cp tuning, phase-synchronized across all agents.
//!
//! Per tick the RNG stream is consumed in a fixed order: movement draws by
//! agent id (two turn draws each), then the matching shuffle and neighbor
//! picks in visit order, then per-pair game draws in match order. A single
//! run is strictly single-threaded; independent runs may execute in
//! parallel.

use thiserror::Error;

use crate::agent::{init_population, Agent, AgentId, PopulationError, PopulationInit, Role};
use crate::experiments::{default_window, RunMetrics};
use crate::game::GameError;
use crate::play::{apply_consequences, decide_pair, PairDecision};
use crate::rng::SimRng;
use crate::tuning::{tune_selfish_fitness, tune_selfish_profit, TuningCriterion, TuningError, TuningRule};
use crate::GameSpec;

pub const DEFAULT_WIDTH: f64 = 13.0;
pub const DEFAULT_HEIGHT: f64 = 13.0;
pub const DEFAULT_NEIGHBOR_RADIUS: f64 = 1.0;
pub const DEFAULT_STEP_LENGTH: f64 = 1.0;

/// Largest value (exclusive) of the two per-tick turn draws, in degrees.
const TURN_SPAN: u64 = 50;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Population(#[from] PopulationError),
    #[error(transparent)]
    Tuning(#[from] TuningError),
    #[error("world geometry must be positive (width={width}, height={height}, radius={radius}, step_length={step_length})")]
    BadGeometry { width: f64, height: f64, radius: f64, step_length: f64 },
    #[error("sweep range must satisfy 0 <= lo <= hi <= 1 with step > 0 (lo={lo}, hi={hi}, step={step})")]
    BadSweepRange { lo: f64, hi: f64, step: f64 },
    #[error("direct reciprocity sweeps must stop at 0.99 (got hi={0})")]
    SweepReachesContinuationOne(f64),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("window must satisfy 1 <= window <= iterations (window={window}, iterations={iterations})")]
    BadWindow { window: usize, iterations: u64 },
}

/// Everything needed to run one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldConfig {
    pub width: f64,
    pub height: f64,
    /// Pairing radius in cell lengths (toroidal Euclidean distance).
    pub neighbor_radius: f64,
    /// Distance moved per tick.
    pub step_length: f64,
    pub spec: GameSpec,
    pub tuning: TuningRule,
    pub init: PopulationInit,
    pub seed: u64,
    pub iterations: u64,
}

impl WorldConfig {
    /// Config with the standard 13x13 torus, radius 1 and step 1.
    pub fn new(
        spec: GameSpec,
        tuning: TuningRule,
        init: PopulationInit,
        seed: u64,
        iterations: u64,
    ) -> Self {
        WorldConfig {
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            neighbor_radius: DEFAULT_NEIGHBOR_RADIUS,
            step_length: DEFAULT_STEP_LENGTH,
            spec,
            tuning,
            init,
            seed,
            iterations,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.spec.validate()?;
        self.tuning.validate()?;
        self.init.validate()?;
        if !(self.width > 0.0
            && self.height > 0.0
            && self.neighbor_radius > 0.0
            && self.step_length > 0.0)
        {
            return Err(ConfigError::BadGeometry {
                width: self.width,
                height: self.height,
                radius: self.neighbor_radius,
                step_length: self.step_length,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct WorldState {
    pub agents: Vec<Agent>,
    pub tick: u64,
    pub rng: SimRng,
}

impl WorldState {
    pub fn init(config: &WorldConfig) -> Self {
        let mut rng = SimRng::seed_from(config.seed);
        let agents = init_population(&config.init, config.width, config.height, &mut rng);
        WorldState { agents, tick: 0, rng }
    }
}

/// Disjoint pairing of agents for one tick.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(AgentId, AgentId)>,
    pub unmatched: Vec<AgentId>,
}

/// One settled game, kept around for ledger checks and replay debugging.
#[derive(Clone, Debug, PartialEq)]
pub struct GameOutcome {
    pub pair: (AgentId, AgentId),
    pub decision: PairDecision,
    pub payoff_i: f64,
    pub payoff_j: f64,
}

/// Shortest wrapped distance between two points on the torus.
pub fn toroidal_distance(a: (f64, f64), b: (f64, f64), width: f64, height: f64) -> f64 {
    let dx = (a.0 - b.0).abs();
    let dy = (a.1 - b.1).abs();
    let dx = dx.min(width - dx);
    let dy = dy.min(height - dy);
    (dx * dx + dy * dy).sqrt()
}

fn wrap(v: f64, extent: f64) -> f64 {
    let w = v.rem_euclid(extent);
    // rem_euclid can round up to the extent itself for tiny negative inputs
    if w >= extent {
        0.0
    } else {
        w
    }
}

/// Turn-and-step update for one agent: add the left turn, subtract the
/// right turn, then advance `step_length` along the heading with wrap.
/// Heading 0 points along +x and degrees increase counterclockwise.
fn advance(agent: &mut Agent, turn_left: f64, turn_right: f64, config: &WorldConfig) {
    agent.heading = (agent.heading + turn_left - turn_right).rem_euclid(360.0);
    let radians = agent.heading.to_radians();
    agent.pos.0 = wrap(agent.pos.0 + config.step_length * radians.cos(), config.width);
    agent.pos.1 = wrap(agent.pos.1 + config.step_length * radians.sin(), config.height);
}

/// Move every agent, in id order: two integer turn draws in `[0, 50)`
/// (left then right), then one step forward.
pub fn move_phase(state: &mut WorldState, config: &WorldConfig) {
    for agent in &mut state.agents {
        let left = state.rng.below(TURN_SPAN) as f64;
        let right = state.rng.below(TURN_SPAN) as f64;
        advance(agent, left, right, config);
    }
}

/// Pair agents greedily in a uniformly shuffled visit order. Each
/// still-unpaired agent collects the unpaired agents within the neighbor
/// radius (in id order) and picks one uniformly; both leave the pool.
/// Agents left unpaired at the end go to `unmatched`.
pub fn match_phase(state: &mut WorldState, config: &WorldConfig) -> Matching {
    let n = state.agents.len();
    let mut order: Vec<AgentId> = (0..n).collect();
    state.rng.shuffle(&mut order);

    let radius_sq = config.neighbor_radius * config.neighbor_radius;
    let within = |a: &Agent, b: &Agent| {
        let dx = (a.pos.0 - b.pos.0).abs();
        let dy = (a.pos.1 - b.pos.1).abs();
        let dx = dx.min(config.width - dx);
        let dy = dy.min(config.height - dy);
        dx * dx + dy * dy <= radius_sq
    };

    let mut paired = vec![false; n];
    let mut pairs = Vec::new();
    for &visitor in &order {
        if paired[visitor] {
            continue;
        }
        let neighbors: Vec<AgentId> = (0..n)
            .filter(|&other| {
                other != visitor
                    && !paired[other]
                    && within(&state.agents[visitor], &state.agents[other])
            })
            .collect();
        if neighbors.is_empty() {
            continue;
        }
        let chosen = neighbors[state.rng.below(neighbors.len() as u64) as usize];
        paired[visitor] = true;
        paired[chosen] = true;
        pairs.push((visitor, chosen));
    }
    let unmatched: Vec<AgentId> = (0..n).filter(|&id| !paired[id]).collect();

    #[cfg(debug_assertions)]
    {
        let mut seen = vec![false; n];
        for &(i, j) in &pairs {
            debug_assert!(!seen[i] && !seen[j], "agent paired twice");
            seen[i] = true;
            seen[j] = true;
            debug_assert!(
                toroidal_distance(
                    state.agents[i].pos,
                    state.agents[j].pos,
                    config.width,
                    config.height
                ) <= config.neighbor_radius,
                "pair outside neighbor radius"
            );
        }
        for &id in &unmatched {
            debug_assert!(!seen[id]);
            seen[id] = true;
        }
        debug_assert!(seen.iter().all(|&s| s), "agent missing from matching");
    }

    Matching { pairs, unmatched }
}

/// Play every matched pair: decide simultaneously from pre-game state,
/// settle consequences, then tune both cps. Unmatched agents are left
/// untouched.
pub fn game_phase(
    state: &mut WorldState,
    matching: &Matching,
    config: &WorldConfig,
) -> Vec<GameOutcome> {
    let mut outcomes = Vec::with_capacity(matching.pairs.len());
    for &(i, j) in &matching.pairs {
        let decision = decide_pair(&config.spec, &state.agents, i, j, &mut state.rng);

        let (prev_i, prev_j) =
            (state.agents[i].last_profit, state.agents[j].last_profit);
        let (agent_i, agent_j) = two_mut(&mut state.agents, i, j);
        let (payoff_i, payoff_j) =
            apply_consequences(&config.spec, decision.action_i, decision.action_j, agent_i, agent_j);

        let delta = config.tuning.delta;
        match config.tuning.criterion {
            TuningCriterion::SelfishFitness => {
                agent_i.cp = tune_selfish_fitness(decision.action_i, payoff_i, agent_i.cp, delta);
                agent_j.cp = tune_selfish_fitness(decision.action_j, payoff_j, agent_j.cp, delta);
            }
            TuningCriterion::SelfishProfit => {
                agent_i.cp = tune_selfish_profit(
                    decision.action_i,
                    payoff_i,
                    prev_i.unwrap_or(0.0),
                    agent_i.cp,
                    delta,
                );
                agent_j.cp = tune_selfish_profit(
                    decision.action_j,
                    payoff_j,
                    prev_j.unwrap_or(0.0),
                    agent_j.cp,
                    delta,
                );
            }
        }

        outcomes.push(GameOutcome { pair: (i, j), decision, payoff_i, payoff_j });
    }
    outcomes
}

fn two_mut(agents: &mut [Agent], i: usize, j: usize) -> (&mut Agent, &mut Agent) {
    debug_assert_ne!(i, j);
    if i < j {
        let (lo, hi) = agents.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = agents.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

/// One full tick: move, match, play, advance the tick counter. Each phase
/// completes for all agents before the next begins.
pub fn step(state: &mut WorldState, config: &WorldConfig) -> Vec<GameOutcome> {
    move_phase(state, config);
    let matching = match_phase(state, config);
    let outcomes = game_phase(state, &matching, config);
    state.tick += 1;
    outcomes
}

/// Share of agents currently classifying as cooperators.
pub fn cooperator_fraction(agents: &[Agent]) -> f64 {
    if agents.is_empty() {
        return 0.0;
    }
    let cooperators = agents.iter().filter(|a| a.role() == Role::Cooperator).count();
    cooperators as f64 / agents.len() as f64
}

/// Run a config to completion, recording the cooperator fraction before
/// the first tick and after every tick. The tail window defaults to the
/// standard rule in [`default_window`].
pub fn run(config: &WorldConfig) -> Result<RunMetrics, ConfigError> {
    run_with_window(config, default_window(config.iterations))
}

/// Run a config to completion with an explicit tail window.
pub fn run_with_window(config: &WorldConfig, window: usize) -> Result<RunMetrics, ConfigError> {
    config.validate()?;
    let mut state = WorldState::init(config);
    let mut series = Vec::with_capacity(config.iterations as usize + 1);
    series.push(cooperator_fraction(&state.agents));
    for _ in 0..config.iterations {
        step(&mut state, config);
        series.push(cooperator_fraction(&state.agents));
    }
    Ok(RunMetrics::from_series(series, window))
}
