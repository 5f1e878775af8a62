//! Per-strategy decision procedures for a matched pair, and the shared
//! consequence step that settles payoffs.
//!
//! Decisions are simultaneous: both actions are computed from the state as
//! it stood before the game, then consequences are applied. The RNG draw
//! order per game is fixed for replayability: the agent with the smaller
//! id draws first, and within an agent the order is decision first, then
//! (indirect reciprocity only) recognition. The recognition value is drawn
//! even on branches that ignore it, so every indirect-reciprocity game
//! consumes exactly two draws per agent and every other game exactly one.

use crate::agent::{Agent, AgentId, Role};
use crate::rng::SimRng;
use crate::{GameSpec, Strategy};

/// RNG draws consumed by one agent in one game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentDraws {
    pub decision: f64,
    pub recognition: Option<f64>,
}

/// Simultaneous actions of a matched pair, with the draws that produced
/// them kept for replay and debugging.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDecision {
    pub action_i: bool,
    pub action_j: bool,
    pub draws_i: AgentDraws,
    pub draws_j: AgentDraws,
}

/// Cooperate iff the decision draw passes the cp gate.
pub fn play_kin_selection(agent: &Agent, rng: &mut SimRng) -> (bool, AgentDraws) {
    let decision = rng.unit();
    (decision <= agent.cp, AgentDraws { decision, recognition: None })
}

/// If the decision draw passes the cp gate, mirror the partner's last
/// recorded action (an unseen partner counts as having cooperated);
/// otherwise defect.
pub fn play_direct_reciprocity(
    agent: &Agent,
    partner: AgentId,
    rng: &mut SimRng,
) -> (bool, AgentDraws) {
    let decision = rng.unit();
    let action = decision <= agent.cp && agent.remembered_action(partner);
    (action, AgentDraws { decision, recognition: None })
}

/// Reputation-gated decision. With probability `q` the focal agent
/// recognizes its partner's role: a cooperator who recognizes a cooperator
/// cooperates outright and one who recognizes a defector defects outright;
/// otherwise (and always for a defector-side focal agent) the cp gate
/// decides.
pub fn play_indirect_reciprocity(
    agent: &Agent,
    partner: &Agent,
    acquaintance: f64,
    rng: &mut SimRng,
) -> (bool, AgentDraws) {
    let decision = rng.unit();
    let recognition = rng.unit();
    let by_cp = decision <= agent.cp;
    let recognized = recognition > 1.0 - acquaintance;
    let action = match (agent.role(), partner.role()) {
        (Role::Cooperator, Role::Cooperator) => {
            if recognized {
                true
            } else {
                by_cp
            }
        }
        (Role::Cooperator, Role::Defector) => {
            if recognized {
                false
            } else {
                by_cp
            }
        }
        (Role::Defector, _) => by_cp,
    };
    (action, AgentDraws { decision, recognition: Some(recognition) })
}

fn play_one(
    spec: &GameSpec,
    agents: &[Agent],
    me: AgentId,
    other: AgentId,
    rng: &mut SimRng,
) -> (bool, AgentDraws) {
    match spec.strategy {
        Strategy::KinSelection => play_kin_selection(&agents[me], rng),
        Strategy::DirectReciprocity => play_direct_reciprocity(&agents[me], other, rng),
        Strategy::IndirectReciprocity => {
            play_indirect_reciprocity(&agents[me], &agents[other], spec.prob, rng)
        }
    }
}

/// Decide both actions for a matched pair from pre-game state. The agent
/// with the smaller id draws first.
pub fn decide_pair(
    spec: &GameSpec,
    agents: &[Agent],
    i: AgentId,
    j: AgentId,
    rng: &mut SimRng,
) -> PairDecision {
    debug_assert_ne!(i, j);
    let (first, second) = if i < j { (i, j) } else { (j, i) };
    let (action_first, draws_first) = play_one(spec, agents, first, second, rng);
    let (action_second, draws_second) = play_one(spec, agents, second, first, rng);
    if first == i {
        PairDecision {
            action_i: action_first,
            action_j: action_second,
            draws_i: draws_first,
            draws_j: draws_second,
        }
    } else {
        PairDecision {
            action_i: action_second,
            action_j: action_first,
            draws_i: draws_second,
            draws_j: draws_first,
        }
    }
}

/// Settle a decided game: each agent receives the payoff the matrix assigns
/// to its (own action, partner action) cell, which is added to fitness and
/// recorded as the last profit. Under direct reciprocity both agents also
/// overwrite their memory of the partner with the partner's action this
/// round. Returns the two payoffs `(payoff_i, payoff_j)`.
pub fn apply_consequences(
    spec: &GameSpec,
    action_i: bool,
    action_j: bool,
    agent_i: &mut Agent,
    agent_j: &mut Agent,
) -> (f64, f64) {
    let matrix = spec.payoff_matrix();
    let payoff_i = matrix.payoff_for(action_i, action_j);
    let payoff_j = matrix.payoff_for(action_j, action_i);
    agent_i.fitness += payoff_i;
    agent_j.fitness += payoff_j;
    agent_i.last_profit = Some(payoff_i);
    agent_j.last_profit = Some(payoff_j);
    if spec.strategy == Strategy::DirectReciprocity {
        agent_i.memory.insert(agent_j.id, action_j);
        agent_j.memory.insert(agent_i.id, action_i);
    }
    (payoff_i, payoff_j)
}
