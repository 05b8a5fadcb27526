//! Objectives, objective profiles and their exact evaluation on lassos.

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::Formula;
use crate::game::{GameStructure, StateId};
use crate::play::LassoPlay;

/// A set of game states.
pub type StateSet = FixedBitSet;

pub fn state_set(num_states: usize, members: impl IntoIterator<Item = StateId>) -> StateSet {
    let mut s = FixedBitSet::with_capacity(num_states);
    members.into_iter().for_each(|m| s.insert(m.0));
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Reach(StateSet),
    Safe(StateSet),
    Buchi(StateSet),
    CoBuchi(StateSet),
    /// Priority per state; won iff the least priority seen infinitely often is even.
    Parity(Vec<u32>),
    Muller(Formula),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveClass {
    Reach,
    Safe,
    Buchi,
    CoBuchi,
    Parity,
    Muller,
}

impl ObjectiveClass {
    pub const SOLVABLE: [ObjectiveClass; 5] =
        [ObjectiveClass::Reach, ObjectiveClass::Safe, ObjectiveClass::Buchi, ObjectiveClass::CoBuchi, ObjectiveClass::Muller];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveClass::Reach => "reach",
            ObjectiveClass::Safe => "safe",
            ObjectiveClass::Buchi => "buchi",
            ObjectiveClass::CoBuchi => "cobuchi",
            ObjectiveClass::Parity => "parity",
            ObjectiveClass::Muller => "muller",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ObjectiveClass::Reach,
            ObjectiveClass::Safe,
            ObjectiveClass::Buchi,
            ObjectiveClass::CoBuchi,
            ObjectiveClass::Parity,
            ObjectiveClass::Muller,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }

    /// Classes whose compiled plays have polynomial length.
    pub fn is_polynomial(self) -> bool {
        matches!(self, ObjectiveClass::Reach | ObjectiveClass::Safe | ObjectiveClass::Buchi | ObjectiveClass::CoBuchi)
    }
}

impl fmt::Display for ObjectiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Objective {
    pub fn class(&self) -> ObjectiveClass {
        match self {
            Objective::Reach(_) => ObjectiveClass::Reach,
            Objective::Safe(_) => ObjectiveClass::Safe,
            Objective::Buchi(_) => ObjectiveClass::Buchi,
            Objective::CoBuchi(_) => ObjectiveClass::CoBuchi,
            Objective::Parity(_) => ObjectiveClass::Parity,
            Objective::Muller(_) => ObjectiveClass::Muller,
        }
    }

    /// The target or safe set of a set-based objective.
    pub fn set(&self) -> Option<&StateSet> {
        match self {
            Objective::Reach(t) | Objective::Safe(t) | Objective::Buchi(t) | Objective::CoBuchi(t) => Some(t),
            _ => None,
        }
    }

    /// Exact value on a play with occurrence set `occ` and infinity set `inf`.
    pub fn holds(&self, occ: &StateSet, inf: &StateSet) -> bool {
        match self {
            Objective::Reach(t) => !occ.is_disjoint(t),
            Objective::Safe(t) => occ.is_subset(t),
            Objective::Buchi(t) => !inf.is_disjoint(t),
            Objective::CoBuchi(t) => inf.is_disjoint(t),
            Objective::Parity(p) => inf.ones().map(|s| p[s]).min().is_some_and(|m| m % 2 == 0),
            Objective::Muller(f) => f.eval(inf),
        }
    }

    /// An equivalent Muller formula for the prefix-independent classes.
    pub fn to_muller(&self, num_states: usize) -> Option<Formula> {
        let atoms = |t: &StateSet| t.ones().map(|s| Formula::atom(StateId(s))).collect::<Vec<_>>();
        match self {
            Objective::Buchi(t) => Some(Formula::any(atoms(t))),
            Objective::CoBuchi(t) => Some(Formula::all(atoms(t).into_iter().map(Formula::not))),
            Objective::Muller(f) => Some(f.clone()),
            Objective::Parity(p) => {
                // Some even k is seen infinitely often and nothing below k is.
                let mut levels: Vec<u32> = p.iter().copied().filter(|k| k % 2 == 0).collect();
                levels.sort_unstable();
                levels.dedup();
                let at = |pred: &dyn Fn(u32) -> bool| {
                    (0..num_states).filter(|&s| pred(p[s])).map(|s| Formula::atom(StateId(s))).collect::<Vec<_>>()
                };
                Some(Formula::any(
                    levels
                        .into_iter()
                        .map(|k| Formula::and(Formula::any(at(&|q| q == k)), Formula::all(at(&|q| q < k).into_iter().map(Formula::not)))),
                ))
            }
            Objective::Reach(_) | Objective::Safe(_) => None,
        }
    }

    fn max_state(&self) -> Option<usize> {
        match self {
            Objective::Reach(t) | Objective::Safe(t) | Objective::Buchi(t) | Objective::CoBuchi(t) => t.ones().last(),
            Objective::Parity(p) => p.len().checked_sub(1),
            Objective::Muller(f) => {
                let mut v = Vec::new();
                f.atoms(&mut v);
                v.into_iter().map(|s| s.0).max()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectiveError {
    #[error("expected {expected} objectives (one per agent), found {found}")]
    Arity { expected: usize, found: usize },
    #[error("agent {agent} has class {found}, but agent 0 has class {expected}")]
    MixedClasses { agent: usize, expected: ObjectiveClass, found: ObjectiveClass },
    #[error("objective of agent {agent} refers to state {state}, outside the game")]
    UnknownState { agent: usize, state: usize },
    #[error("parity objective of agent {agent} has {found} priorities for {expected} states")]
    ParityArity { agent: usize, expected: usize, found: usize },
}

/// One objective per agent, all of the same class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectiveProfile {
    objectives: Vec<Objective>,
    class: ObjectiveClass,
}

impl ObjectiveProfile {
    pub fn new(g: &GameStructure, objectives: Vec<Objective>) -> Result<Self, ObjectiveError> {
        if objectives.len() != g.num_agents() || objectives.is_empty() {
            return Err(ObjectiveError::Arity { expected: g.num_agents(), found: objectives.len() });
        }
        let class = objectives[0].class();
        for (agent, o) in objectives.iter().enumerate() {
            if o.class() != class {
                return Err(ObjectiveError::MixedClasses { agent, expected: class, found: o.class() });
            }
            if let Objective::Parity(p) = o {
                if p.len() != g.num_states() {
                    return Err(ObjectiveError::ParityArity { agent, expected: g.num_states(), found: p.len() });
                }
            } else if let Some(state) = o.max_state().filter(|&s| s >= g.num_states()) {
                return Err(ObjectiveError::UnknownState { agent, state });
            }
        }
        Ok(ObjectiveProfile { objectives, class })
    }

    pub fn class(&self) -> ObjectiveClass {
        self.class
    }

    pub fn get(&self, agent: usize) -> &Objective {
        &self.objectives[agent]
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    /// The same profile with every objective rewritten as a Muller formula.
    /// Fails for reachability and safety, which are not prefix independent.
    pub fn to_muller(&self, g: &GameStructure) -> Option<ObjectiveProfile> {
        let objectives = self.objectives.iter().map(|o| o.to_muller(g.num_states()).map(Objective::Muller)).collect::<Option<Vec<_>>>()?;
        Some(ObjectiveProfile { objectives, class: ObjectiveClass::Muller })
    }
}

pub fn eval_objective(obj: &Objective, play: &LassoPlay, num_states: usize) -> bool {
    obj.holds(&play.occ(num_states), &play.inf(num_states))
}

/// Bit `i` is agent `i`'s payoff on `play`.
pub fn payoff(g: &GameStructure, objs: &ObjectiveProfile, play: &LassoPlay) -> Vec<bool> {
    let (occ, inf) = (play.occ(g.num_states()), play.inf(g.num_states()));
    objs.objectives.iter().map(|o| o.holds(&occ, &inf)).collect()
}
