//! Agent state, the cooperator/defector partition and population
//! initialization.

use std::collections::HashMap;

use thiserror::Error;

use crate::rng::SimRng;

pub type AgentId = usize;

/// Label derived from the cooperation probability: an agent with cp above
/// one half identifies as a cooperator, at or below as a defector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Cooperator,
    Defector,
}

/// Cooperator iff `cp > 0.5`.
pub fn classify_agent(cp: f64) -> Role {
    if cp > 0.5 {
        Role::Cooperator
    } else {
        Role::Defector
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    /// Toroidal coordinates in `[0, width) x [0, height)`.
    pub pos: (f64, f64),
    /// Heading in degrees, `[0, 360)`; 0 points along +x.
    pub heading: f64,
    /// Cooperation probability in `[0, 1]`.
    pub cp: f64,
    /// Cumulative payoff since initialization.
    pub fitness: f64,
    /// Payoff of the most recent game, absent before the first game.
    pub last_profit: Option<f64>,
    /// Last recorded action of each partner towards this agent (direct
    /// reciprocity only).
    pub memory: HashMap<AgentId, bool>,
}

impl Agent {
    pub fn new(id: AgentId, pos: (f64, f64), heading: f64, cp: f64) -> Self {
        Agent { id, pos, heading, cp, fitness: 0.0, last_profit: None, memory: HashMap::new() }
    }

    pub fn role(&self) -> Role {
        classify_agent(self.cp)
    }

    /// Remembered last action of `partner`; an unseen partner counts as
    /// having cooperated.
    pub fn remembered_action(&self, partner: AgentId) -> bool {
        self.memory.get(&partner).copied().unwrap_or(true)
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum PopulationError {
    #[error("population must be at least 1")]
    EmptyPopulation,
    #[error("ipc must lie in [0, 1] (got {0})")]
    InvalidProportion(f64),
    #[error("icpc must lie in (0.5, 1] so initial cooperators classify as such (got {0})")]
    InvalidCooperatorCp(f64),
    #[error("icpd must lie in [0, 0.5] so initial defectors classify as such (got {0})")]
    InvalidDefectorCp(f64),
}

/// Population parameters: size, initial proportion of cooperators and the
/// initial cp handed to each side of the partition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationInit {
    pub population: usize,
    /// Initial proportion of cooperators; the defector proportion is its
    /// complement.
    pub ipc: f64,
    /// Initial cp of cooperators, in `(0.5, 1]`.
    pub icpc: f64,
    /// Initial cp of defectors, in `[0, 0.5]`.
    pub icpd: f64,
}

impl PopulationInit {
    pub fn new(
        population: usize,
        ipc: f64,
        icpc: f64,
        icpd: f64,
    ) -> Result<Self, PopulationError> {
        let init = PopulationInit { population, ipc, icpc, icpd };
        init.validate()?;
        Ok(init)
    }

    pub fn validate(&self) -> Result<(), PopulationError> {
        if self.population == 0 {
            return Err(PopulationError::EmptyPopulation);
        }
        if !(0.0..=1.0).contains(&self.ipc) {
            return Err(PopulationError::InvalidProportion(self.ipc));
        }
        if !(self.icpc > 0.5 && self.icpc <= 1.0) {
            return Err(PopulationError::InvalidCooperatorCp(self.icpc));
        }
        if !(0.0..=0.5).contains(&self.icpd) {
            return Err(PopulationError::InvalidDefectorCp(self.icpd));
        }
        Ok(())
    }

    /// Number of agents that start as cooperators: `population * ipc`
    /// rounded half-up.
    pub fn cooperator_count(&self) -> usize {
        (self.population as f64 * self.ipc + 0.5).floor() as usize
    }
}

/// Create the initial population: the first `cooperator_count` agents get
/// cp = icpc, the rest cp = icpd; positions are uniform on the torus and
/// headings uniform in `[0, 360)`. Per agent, in id order, the draws are
/// x, y, heading.
pub fn init_population(
    init: &PopulationInit,
    width: f64,
    height: f64,
    rng: &mut SimRng,
) -> Vec<Agent> {
    let cooperators = init.cooperator_count();
    (0..init.population)
        .map(|id| {
            let x = rng.unit() * width;
            let y = rng.unit() * height;
            let heading = rng.unit() * 360.0;
            let cp = if id < cooperators { init.icpc } else { init.icpd };
            Agent::new(id, (x, y), heading, cp)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_boundary() {
        assert_eq!(classify_agent(0.65), Role::Cooperator);
        assert_eq!(classify_agent(0.5), Role::Defector);
        assert_eq!(classify_agent(0.0), Role::Defector);
        assert_eq!(classify_agent(1.0), Role::Cooperator);
    }

    #[test]
    fn half_and_half_start() {
        let init = PopulationInit::new(60, 0.5, 0.65, 0.35).unwrap();
        let mut rng = SimRng::seed_from(1);
        let agents = init_population(&init, 13.0, 13.0, &mut rng);
        assert_eq!(agents.len(), 60);
        assert_eq!(agents.iter().filter(|a| a.cp == 0.65).count(), 30);
        assert_eq!(agents.iter().filter(|a| a.cp == 0.35).count(), 30);
        assert_eq!(agents.iter().filter(|a| a.role() == Role::Cooperator).count(), 30);
        for agent in &agents {
            assert!((0.0..13.0).contains(&agent.pos.0));
            assert!((0.0..13.0).contains(&agent.pos.1));
            assert!((0.0..360.0).contains(&agent.heading));
            assert_eq!(agent.fitness, 0.0);
            assert_eq!(agent.last_profit, None);
            assert!(agent.memory.is_empty());
        }
    }

    #[test]
    fn all_cooperators_start() {
        let init = PopulationInit::new(20, 1.0, 0.65, 0.35).unwrap();
        let mut rng = SimRng::seed_from(2);
        let agents = init_population(&init, 13.0, 13.0, &mut rng);
        assert!(agents.iter().all(|a| a.cp == 0.65));
    }

    #[test]
    fn all_defectors_start() {
        let init = PopulationInit::new(10, 0.0, 0.65, 0.35).unwrap();
        let mut rng = SimRng::seed_from(3);
        let agents = init_population(&init, 13.0, 13.0, &mut rng);
        assert!(agents.iter().all(|a| a.cp == 0.35));
    }

    #[test]
    fn rounding_is_half_up() {
        let init = PopulationInit::new(7, 0.5, 0.65, 0.35).unwrap();
        assert_eq!(init.cooperator_count(), 4);
        let init = PopulationInit::new(60, 0.333, 0.65, 0.35).unwrap();
        assert_eq!(init.cooperator_count(), 20);
        let init = PopulationInit::new(60, 0.666, 0.65, 0.35).unwrap();
        assert_eq!(init.cooperator_count(), 40);
    }

    #[test]
    fn validation_rejects_out_of_range_parameters() {
        assert_eq!(PopulationInit::new(0, 0.5, 0.65, 0.35), Err(PopulationError::EmptyPopulation));
        assert!(matches!(
            PopulationInit::new(10, 1.5, 0.65, 0.35),
            Err(PopulationError::InvalidProportion(_))
        ));
        assert!(matches!(
            PopulationInit::new(10, 0.5, 0.5, 0.35),
            Err(PopulationError::InvalidCooperatorCp(_))
        ));
        assert!(matches!(
            PopulationInit::new(10, 0.5, 0.65, 0.55),
            Err(PopulationError::InvalidDefectorCp(_))
        ));
    }

    #[test]
    fn unseen_partner_counts_as_cooperative() {
        let agent = Agent::new(0, (0.0, 0.0), 0.0, 0.65);
        assert!(agent.remembered_action(7));
    }
}
