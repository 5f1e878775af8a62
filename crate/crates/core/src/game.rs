//! Payoff matrices, cooperation thresholds and game classification for the
//! three strategies.
//!
//! Every strategy turns a `(b, c, x)` triple into a 2x2 symmetric game,
//! where `b` is the benefit a cooperator hands its partner, `c` the cost it
//! pays, and `x` the strategy's own probability variable: relatedness `r`
//! (kin selection), continuation probability `w` (direct reciprocity) or
//! acquaintanceship `q` (indirect reciprocity). The mutual-defection cell
//! is zero in all three games.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::{ties, Scalar};

/// The three cooperation mechanisms a population can play under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    KinSelection,
    DirectReciprocity,
    IndirectReciprocity,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::KinSelection,
        Strategy::DirectReciprocity,
        Strategy::IndirectReciprocity,
    ];

    /// Two-letter code used in tables, CSV output and the CLI.
    pub fn code(self) -> &'static str {
        match self {
            Strategy::KinSelection => "KS",
            Strategy::DirectReciprocity => "DR",
            Strategy::IndirectReciprocity => "IR",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Strategy {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ks" | "kin-selection" | "kinselection" => Ok(Strategy::KinSelection),
            "dr" | "direct-reciprocity" | "directreciprocity" => Ok(Strategy::DirectReciprocity),
            "ir" | "indirect-reciprocity" | "indirectreciprocity" => {
                Ok(Strategy::IndirectReciprocity)
            }
            _ => Err(GameError::UnknownStrategy(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GameError {
    #[error("unknown strategy `{0}` (expected KS, DR or IR)")]
    UnknownStrategy(String),
    #[error("benefit/cost must satisfy b > c > 0 (got b={benefit}, c={cost})")]
    InvalidBenefitCost { benefit: f64, cost: f64 },
    #[error("probability x must lie in [0, 1] (got {value})")]
    ProbabilityOutOfRange { value: f64 },
    #[error("direct reciprocity requires w < 1 (the reward entry diverges at w = 1)")]
    ContinuationAtOne,
    #[error(
        "thresholds unreachable for b/c = {ratio}: ess needs x = {ess}, rd needs x = {rd}, \
         ad needs x = {ad}, all of which must be <= 1"
    )]
    UnreachableThresholds { ratio: f64, ess: f64, rd: f64, ad: f64 },
}

/// One game instance: a strategy plus the `(b, c, x)` triple that fixes its
/// payoff matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameSpec<S> {
    pub strategy: Strategy,
    /// Benefit `b` handed to the partner by a cooperator, in payoff units.
    pub benefit: S,
    /// Cost `c` paid by a cooperator, in payoff units.
    pub cost: S,
    /// The strategy's probability variable (`r`, `w` or `q`), in `[0, 1]`;
    /// strictly below 1 for direct reciprocity.
    pub prob: S,
}

/// The four outcomes of a symmetric 2x2 cooperation game, from the focal
/// player's point of view.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayoffMatrix<S> {
    /// R: both cooperate.
    pub reward: S,
    /// S: focal cooperates, partner defects.
    pub sucker: S,
    /// T: focal defects, partner cooperates.
    pub temptation: S,
    /// P: both defect. Zero for all three strategies.
    pub punishment: S,
}

impl<S: Scalar> PayoffMatrix<S> {
    /// Payoff received by a player who took `mine` against `theirs`
    /// (`true` = cooperate).
    pub fn payoff_for(&self, mine: bool, theirs: bool) -> S {
        match (mine, theirs) {
            (true, true) => self.reward,
            (true, false) => self.sucker,
            (false, true) => self.temptation,
            (false, false) => self.punishment,
        }
    }
}

/// The `x` values at which each cooperation condition turns into an
/// equality for fixed `(b, c)`. Above `ess` cooperation is evolutionarily
/// stable, above `rd` it is risk-dominant, above `ad` it is advantageous.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds<S> {
    pub ess: S,
    pub rd: S,
    pub ad: S,
}

/// Classification of a payoff matrix by the ordering of its four entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameClass {
    /// T > R > P > S: defection dominates.
    PrisonersDilemma,
    /// R > T > P > S: mutual cooperation and mutual defection are both
    /// stable; players prefer P to S.
    StagHunt,
    /// R > T > S > P: cooperators always come out ahead (kin selection
    /// above its threshold).
    UnidentifiedCooperatorsWin,
    /// R > T = S > P: kin selection at r = 1.
    UnidentifiedTieTS,
    /// R > T = P = S: indirect reciprocity at q = 1; only mutual
    /// cooperation pays.
    UnidentifiedOnlyMutual,
    /// An exact tie at a transition point (or an ordering outside the
    /// named taxonomy).
    Boundary,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GameClass::PrisonersDilemma => "PrisonersDilemma",
            GameClass::StagHunt => "StagHunt",
            GameClass::UnidentifiedCooperatorsWin => "UnidentifiedCooperatorsWin",
            GameClass::UnidentifiedTieTS => "UnidentifiedTieTS",
            GameClass::UnidentifiedOnlyMutual => "UnidentifiedOnlyMutual",
            GameClass::Boundary => "Boundary",
        };
        f.write_str(name)
    }
}

/// Strongest satisfied cooperation condition for a spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Ess,
    RiskDominant,
    Advantageous,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::Ess => "ESS",
            Regime::RiskDominant => "RD",
            Regime::Advantageous => "AD",
        };
        f.write_str(name)
    }
}

impl<S: Scalar> GameSpec<S> {
    pub fn new(strategy: Strategy, benefit: S, cost: S, prob: S) -> Result<Self, GameError> {
        let spec = GameSpec { strategy, benefit, cost, prob };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let zero = S::zero();
        let one = S::one();
        if !(self.benefit > zero && self.cost > zero && self.benefit > self.cost) {
            return Err(GameError::InvalidBenefitCost {
                benefit: self.benefit.to_f64().unwrap_or(f64::NAN),
                cost: self.cost.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !(self.prob >= zero && self.prob <= one) {
            return Err(GameError::ProbabilityOutOfRange {
                value: self.prob.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.strategy == Strategy::DirectReciprocity && self.prob == one {
            return Err(GameError::ContinuationAtOne);
        }
        Ok(())
    }

    /// Build the payoff matrix for this spec.
    ///
    /// Kin selection:        R = (b-c)(1+r), S = br-c,    T = b-rc,   P = 0.
    /// Direct reciprocity:   R = (b-c)/(1-w), S = -c,     T = b,      P = 0.
    /// Indirect reciprocity: R = b-c,        S = -c(1-q), T = b(1-q), P = 0.
    ///
    /// The indirect-reciprocity temptation entry is `b(1-q)`: a defector
    /// only pockets the benefit when the cooperator fails to recognize it,
    /// which is the unique choice consistent with the ESS condition
    /// `b/c > 1/q` (so that R > T exactly when `q > c/b`) and with the
    /// R > T = P = S degenerate game at q = 1.
    pub fn payoff_matrix(&self) -> PayoffMatrix<S> {
        let b = self.benefit;
        let c = self.cost;
        let x = self.prob;
        let one = S::one();
        let zero = S::zero();
        match self.strategy {
            Strategy::KinSelection => PayoffMatrix {
                reward: (b - c) * (one + x),
                sucker: b * x - c,
                temptation: b - x * c,
                punishment: zero,
            },
            Strategy::DirectReciprocity => PayoffMatrix {
                reward: (b - c) / (one - x),
                sucker: -c,
                temptation: b,
                punishment: zero,
            },
            Strategy::IndirectReciprocity => PayoffMatrix {
                // Written as c(x-1) so q = 1 yields +0 rather than -0.
                sucker: c * (x - one),
                reward: b - c,
                temptation: b * (one - x),
                punishment: zero,
            },
        }
    }

    /// Classify the game by the ordering (with ties) of its payoff entries.
    pub fn classify(&self) -> GameClass {
        let m = self.payoff_matrix();
        classify_ordering(m.reward, m.sucker, m.temptation, m.punishment)
    }

    /// Strongest satisfied condition: `Advantageous` if `x` is above the
    /// AD threshold, else `RiskDominant` above RD, else `Ess` above ESS,
    /// else `None`. All comparisons are strict.
    pub fn regime(&self) -> Option<Regime> {
        let th = thresholds(self.strategy, self.benefit, self.cost)
            .expect("b > c > 0 makes all thresholds reachable");
        if self.prob > th.ad {
            Some(Regime::Advantageous)
        } else if self.prob > th.rd {
            Some(Regime::RiskDominant)
        } else if self.prob > th.ess {
            Some(Regime::Ess)
        } else {
            None
        }
    }
}

/// Map an `(R, S, T, P)` ordering, with ties up to the scalar's tolerance,
/// onto the game taxonomy.
fn classify_ordering<S: Scalar>(r: S, s: S, t: S, p: S) -> GameClass {
    let gt = |a: S, b: S| a > b && !ties(a, b);

    // Named tie patterns first; any other tie is a transition boundary.
    if ties(t, p) && ties(p, s) && ties(t, s) && gt(r, t) {
        return GameClass::UnidentifiedOnlyMutual;
    }
    if ties(t, s) && gt(r, t) && gt(s, p) {
        return GameClass::UnidentifiedTieTS;
    }
    let any_tie = ties(r, s) || ties(r, t) || ties(r, p) || ties(s, t) || ties(s, p) || ties(t, p);
    if any_tie {
        return GameClass::Boundary;
    }

    if gt(t, r) && gt(r, p) && gt(p, s) {
        GameClass::PrisonersDilemma
    } else if gt(r, t) && gt(t, p) && gt(p, s) {
        GameClass::StagHunt
    } else if gt(r, t) && gt(t, s) && gt(s, p) {
        GameClass::UnidentifiedCooperatorsWin
    } else {
        // Orderings outside the named taxonomy are reported as boundaries
        // rather than guessed at.
        GameClass::Boundary
    }
}

/// Solve each cooperation condition for equality in `x` at fixed `(b, c)`.
///
/// Kin selection has a single condition `b/c > 1/r`, so all three
/// thresholds coincide at `c/b`. Direct and indirect reciprocity solve
/// `b/c > 1/x`, `b/c > (2-x)/x` and `b/c > (3-2x)/x`, giving `c/b`,
/// `2c/(b+c)` and `3c/(b+2c)`.
///
/// Errors with [`GameError::UnreachableThresholds`] when a solution
/// exceeds 1 (which happens exactly when `b < c`).
pub fn thresholds<S: Scalar>(
    strategy: Strategy,
    benefit: S,
    cost: S,
) -> Result<Thresholds<S>, GameError> {
    let zero = S::zero();
    let one = S::one();
    if !(benefit > zero && cost > zero) {
        return Err(GameError::InvalidBenefitCost {
            benefit: benefit.to_f64().unwrap_or(f64::NAN),
            cost: cost.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = one + one;
    let three = two + one;
    let ess = cost / benefit;
    let (rd, ad) = match strategy {
        Strategy::KinSelection => (ess, ess),
        Strategy::DirectReciprocity | Strategy::IndirectReciprocity => (
            two * cost / (benefit + cost),
            three * cost / (benefit + two * cost),
        ),
    };
    if ess > one || rd > one || ad > one {
        return Err(GameError::UnreachableThresholds {
            ratio: (benefit / cost).to_f64().unwrap_or(f64::NAN),
            ess: ess.to_f64().unwrap_or(f64::NAN),
            rd: rd.to_f64().unwrap_or(f64::NAN),
            ad: ad.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Thresholds { ess, rd, ad })
}
