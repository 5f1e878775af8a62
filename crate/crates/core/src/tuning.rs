//! The two self-organizing cp-update rules.
//!
//! After each game an agent nudges its cooperation probability by a fixed
//! step `delta`, in a direction that depends only on its own action and on
//! whether its situation improved. "Selfish fitness" reads improvement off
//! the sign of the payoff just received; "selfish profit" compares the
//! payoff just received with the payoff of the previous game.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

/// Default cp adjustment step. Small enough that the long-run average
/// dominates the transient (cp crosses `[0, 1]` in at most 100 games).
pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TuningError {
    #[error("delta must lie in (0, 0.5] (got {0})")]
    InvalidDelta(f64),
    #[error("unknown tuning rule `{0}` (expected sf or sp)")]
    UnknownRule(String),
}

/// Which comparison drives the cp update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TuningCriterion {
    /// Sign of the payoff just received.
    SelfishFitness,
    /// Payoff just received versus the previous game's payoff.
    SelfishProfit,
}

impl TuningCriterion {
    /// Short code used in tables, CSV output and the CLI.
    pub fn code(self) -> &'static str {
        match self {
            TuningCriterion::SelfishFitness => "sf",
            TuningCriterion::SelfishProfit => "sp",
        }
    }
}

impl fmt::Display for TuningCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TuningCriterion {
    type Err = TuningError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sf" | "selfish-fitness" | "selfishfitness" => Ok(TuningCriterion::SelfishFitness),
            "sp" | "selfish-profit" | "selfishprofit" => Ok(TuningCriterion::SelfishProfit),
            _ => Err(TuningError::UnknownRule(s.to_string())),
        }
    }
}

/// A tuning criterion plus its step size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuningRule {
    pub criterion: TuningCriterion,
    pub delta: f64,
}

impl TuningRule {
    pub fn new(criterion: TuningCriterion, delta: f64) -> Result<Self, TuningError> {
        let rule = TuningRule { criterion, delta };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<(), TuningError> {
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(TuningError::InvalidDelta(self.delta));
        }
        Ok(())
    }

    pub fn selfish_fitness() -> Self {
        TuningRule { criterion: TuningCriterion::SelfishFitness, delta: DEFAULT_DELTA }
    }

    pub fn selfish_profit() -> Self {
        TuningRule { criterion: TuningCriterion::SelfishProfit, delta: DEFAULT_DELTA }
    }
}

/// Shared core of both rules: move cp towards cooperation when the outcome
/// improved while cooperating or worsened while defecting, away from it in
/// the two opposite cases, and not at all on a neutral outcome.
fn nudge<S: Scalar>(cp: S, cooperated: bool, improved: Option<bool>, delta: S) -> S {
    let next = match improved {
        None => cp,
        Some(up) => {
            if up == cooperated {
                cp + delta
            } else {
                cp - delta
            }
        }
    };
    next.max(S::zero()).min(S::one())
}

/// Update cp from the sign of the payoff just received.
pub fn tune_selfish_fitness<S: Scalar>(cooperated: bool, payoff: S, cp: S, delta: S) -> S {
    let improved = if payoff > S::zero() {
        Some(true)
    } else if payoff < S::zero() {
        Some(false)
    } else {
        None
    };
    nudge(cp, cooperated, improved, delta)
}

/// Update cp from the comparison of this game's payoff with the previous
/// game's payoff.
pub fn tune_selfish_profit<S: Scalar>(
    cooperated: bool,
    profit_now: S,
    profit_prev: S,
    cp: S,
    delta: S,
) -> S {
    let improved = if profit_now > profit_prev {
        Some(true)
    } else if profit_now < profit_prev {
        Some(false)
    } else {
        None
    };
    nudge(cp, cooperated, improved, delta)
}
