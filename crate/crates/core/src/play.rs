//! Histories and ultimately periodic plays.

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::game::{ActionProfile, GameError, GameStructure, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlayError {
    #[error("lasso loop is empty")]
    EmptyLoop,
    #[error("step {index} does not follow the transition table")]
    BrokenStep { index: usize },
    #[error("history must start at the initial state")]
    WrongStart,
    #[error("no transition leads from state {from} to state {to}")]
    NoEdge { from: usize, to: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A state together with the profile played there.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub state: StateId,
    pub profile: ActionProfile,
}

/// An ultimately periodic play `prefix . loop^omega`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoPlay {
    pub prefix: Vec<Step>,
    pub cycle: Vec<Step>,
}

impl LassoPlay {
    /// Builds a lasso from its state sequence, choosing for every edge the
    /// least profile realizing it.
    pub fn from_states(g: &GameStructure, prefix: &[StateId], cycle: &[StateId]) -> Result<Self, PlayError> {
        if cycle.is_empty() {
            return Err(PlayError::EmptyLoop);
        }
        let seq: Vec<StateId> = prefix.iter().chain(cycle).copied().collect();
        let mut steps = Vec::with_capacity(seq.len());
        for (k, &s) in seq.iter().enumerate() {
            let next = if k + 1 < seq.len() { seq[k + 1] } else { cycle[0] };
            let profile = g.profiles().find(|p| g.successor(s, p).ok() == Some(next)).ok_or(PlayError::NoEdge { from: s.0, to: next.0 })?;
            steps.push(Step { state: s, profile });
        }
        let cycle = steps.split_off(prefix.len());
        Ok(LassoPlay { prefix: steps, cycle })
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.prefix.iter().chain(&self.cycle)
    }

    pub fn validate(&self, g: &GameStructure) -> Result<(), PlayError> {
        if self.cycle.is_empty() {
            return Err(PlayError::EmptyLoop);
        }
        let steps: Vec<&Step> = self.steps().collect();
        for (k, st) in steps.iter().enumerate() {
            let next = steps.get(k + 1).map_or(self.cycle[0].state, |n| n.state);
            if g.successor(st.state, &st.profile)? != next {
                return Err(PlayError::BrokenStep { index: k });
            }
        }
        Ok(())
    }

    pub fn occ(&self, num_states: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(num_states);
        self.steps().for_each(|st| s.insert(st.state.0));
        s
    }

    pub fn inf(&self, num_states: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(num_states);
        self.cycle.iter().for_each(|st| s.insert(st.state.0));
        s
    }

    /// The same play with its loop rotated by `k` steps (the rotated-away
    /// steps move to the prefix).
    pub fn rotate(&self, k: usize) -> LassoPlay {
        let k = k % self.cycle.len();
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..k]);
        let mut cycle = self.cycle[k..].to_vec();
        cycle.extend_from_slice(&self.cycle[..k]);
        LassoPlay { prefix, cycle }
    }

    pub fn display<'a>(&'a self, g: &'a GameStructure) -> impl fmt::Display + 'a {
        struct D<'a>(&'a LassoPlay, &'a GameStructure);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let (l, g) = (self.0, self.1);
                let show = |steps: &[Step]| {
                    steps
                        .iter()
                        .map(|s| format!("{} {}", g.state_name(s.state), g.profile_to_string(&s.profile)))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                write!(f, "<{} | {}>", show(&l.prefix), show(&l.cycle))
            }
        }
        D(self, g)
    }
}

/// `s0 p0 s1 p1 .. sk`: one more state than profiles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct History {
    pub states: Vec<StateId>,
    pub profiles: Vec<ActionProfile>,
}

impl History {
    pub fn new(start: StateId) -> Self {
        History { states: vec![start], profiles: Vec::new() }
    }

    pub fn push(&mut self, profile: ActionProfile, next: StateId) {
        self.profiles.push(profile);
        self.states.push(next);
    }

    /// Extends by `profile`, taking the successor from the table.
    pub fn extend(&mut self, g: &GameStructure, profile: ActionProfile) -> Result<(), PlayError> {
        let next = g.successor(self.last(), &profile)?;
        self.push(profile, next);
        Ok(())
    }

    pub fn last(&self) -> StateId {
        *self.states.last().expect("history is nonempty")
    }

    /// Number of action profiles.
    pub fn rounds(&self) -> usize {
        self.profiles.len()
    }

    /// The prefix with `rounds` action profiles.
    pub fn prefix(&self, rounds: usize) -> History {
        History { states: self.states[..=rounds].to_vec(), profiles: self.profiles[..rounds].to_vec() }
    }

    pub fn validate(&self, g: &GameStructure) -> Result<(), PlayError> {
        if self.states.first() != Some(&g.initial()) {
            return Err(PlayError::WrongStart);
        }
        if self.states.len() != self.profiles.len() + 1 {
            return Err(PlayError::BrokenStep { index: self.profiles.len() });
        }
        for (k, p) in self.profiles.iter().enumerate() {
            if g.successor(self.states[k], p)? != self.states[k + 1] {
                return Err(PlayError::BrokenStep { index: k });
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, g: &'a GameStructure) -> impl fmt::Display + 'a {
        struct D<'a>(&'a History, &'a GameStructure);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let (h, g) = (self.0, self.1);
                write!(f, "{}", g.state_name(h.states[0]))?;
                for (p, s) in h.profiles.iter().zip(&h.states[1..]) {
                    write!(f, " {} {}", g.profile_to_string(p), g.state_name(*s))?;
                }
                Ok(())
            }
        }
        D(self, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::figure1;

    #[test]
    fn lasso_from_states_validates() {
        let (g, _) = figure1();
        let st = |n| g.state_by_name(n).unwrap();
        let l = LassoPlay::from_states(&g, &[st("s0"), st("s1")], &[st("T01")]).unwrap();
        l.validate(&g).unwrap();
        assert!(LassoPlay::from_states(&g, &[st("s0")], &[st("T01")]).is_err());
        assert_eq!(LassoPlay::from_states(&g, &[st("s0")], &[]), Err(PlayError::EmptyLoop));
    }

    #[test]
    fn history_validation() {
        let (g, _) = figure1();
        let mut h = History::new(g.initial());
        h.extend(&g, ActionProfile::from_indices(&[1, 0, 1])).unwrap();
        h.validate(&g).unwrap();
        assert_eq!(h.display(&g).to_string(), "s0 (r,a,b) s1");
        let mut bad = h.clone();
        bad.states[1] = g.state_by_name("s2").unwrap();
        assert_eq!(bad.validate(&g), Err(PlayError::BrokenStep { index: 0 }));
    }
}
