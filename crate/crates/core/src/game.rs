//! Concurrent game structures.
//!
//! A game has states `0..|S|`, agents `0..=n` (agent 0 is the system) and a
//! transition table indexed by (state, action profile). Profiles are stored
//! in mixed radix: `index = a0 + |Act_0| * env_index`, where `env_index`
//! encodes the environment part `(a1, .., an)` with agent 1 least significant.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

/// One action per agent, agent 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile(pub Vec<ActionId>);

impl ActionProfile {
    pub fn from_indices(actions: &[usize]) -> Self {
        ActionProfile(actions.iter().map(|&a| ActionId(a)).collect())
    }

    pub fn agent0(&self) -> ActionId {
        self.0[0]
    }

    /// The environment part `(a1, .., an)`.
    pub fn env(&self) -> &[ActionId] {
        &self.0[1..]
    }

    pub fn join(agent0: ActionId, env: &[ActionId]) -> Self {
        let mut v = Vec::with_capacity(env.len() + 1);
        v.push(agent0);
        v.extend_from_slice(env);
        ActionProfile(v)
    }
}

/// A set of agents as a bitmask; supports up to 64 agents.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentSet(pub u64);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub fn singleton(i: usize) -> Self {
        AgentSet(1 << i)
    }

    pub fn from_agents(agents: impl IntoIterator<Item = usize>) -> Self {
        agents.into_iter().fold(AgentSet::EMPTY, |s, i| s.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        AgentSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        AgentSet(self.0 & !(1 << i))
    }

    pub fn union(self, o: AgentSet) -> Self {
        AgentSet(self.0 | o.0)
    }

    pub fn intersection(self, o: AgentSet) -> Self {
        AgentSet(self.0 & o.0)
    }

    pub fn difference(self, o: AgentSet) -> Self {
        AgentSet(self.0 & !o.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, o: AgentSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Least member, if any.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("unknown state {0}")]
    UnknownState(usize),
    #[error("profile has {found} entries, expected {expected}")]
    ProfileArity { expected: usize, found: usize },
    #[error("action {action} is not declared for agent {agent}")]
    UnknownAction { agent: usize, action: usize },
    #[error("no transition from state {state} under profile {profile:?}")]
    MissingTransition { state: usize, profile: Vec<usize> },
}

/// A defect found by [`validate_game`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    NoStates,
    InitialOutOfRange { initial: StateId },
    EmptyActionSet { agent: AgentId },
    MissingTransition { state: StateId, profile: ActionProfile },
    DanglingSuccessor { state: StateId, profile: ActionProfile, successor: StateId },
    ConflictingTransition { state: StateId, profile: ActionProfile, first: StateId, second: StateId },
}

impl Defect {
    /// Short machine-readable kind.
    pub fn code(&self) -> &'static str {
        match self {
            Defect::NoStates => "no-states",
            Defect::InitialOutOfRange { .. } => "initial-out-of-range",
            Defect::EmptyActionSet { .. } => "empty-action-set",
            Defect::MissingTransition { .. } => "missing transition",
            Defect::DanglingSuccessor { .. } => "dangling successor",
            Defect::ConflictingTransition { .. } => "conflicting transition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub defects: Vec<Defect>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Accumulates transition entries; conflicting entries are kept as defects
/// rather than rejected so that validation can report all of them.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    states: Vec<String>,
    initial: StateId,
    actions: Vec<Vec<String>>,
    table: Vec<Option<StateId>>,
    conflicts: Vec<Defect>,
}

impl GameBuilder {
    /// `actions[i]` lists the action names of agent `i`; agent 0 comes first.
    pub fn new(states: Vec<String>, initial: StateId, actions: Vec<Vec<String>>) -> Self {
        let profiles: usize = actions.iter().map(Vec::len).product();
        GameBuilder { table: vec![None; states.len() * profiles], states, initial, actions, conflicts: Vec::new() }
    }

    fn layout(&self) -> Layout {
        Layout::new(&self.actions)
    }

    /// Sets `Tab(s, p) = succ`. The successor may lie outside the state set;
    /// validation reports it.
    pub fn set(&mut self, s: StateId, p: &ActionProfile, succ: StateId) -> Result<(), GameError> {
        let layout = self.layout();
        check_profile(&self.actions, p)?;
        if s.0 >= self.states.len() {
            return Err(GameError::UnknownState(s.0));
        }
        let slot = s.0 * layout.num_profiles + layout.index(p);
        match self.table[slot] {
            Some(prev) if prev != succ => {
                self.conflicts.push(Defect::ConflictingTransition { state: s, profile: p.clone(), first: prev, second: succ })
            }
            _ => self.table[slot] = Some(succ),
        }
        Ok(())
    }

    /// Sets every profile matching `pattern`; `None` is a wildcard.
    pub fn set_pattern(&mut self, s: StateId, pattern: &[Option<ActionId>], succ: StateId) -> Result<(), GameError> {
        if pattern.len() != self.actions.len() {
            return Err(GameError::ProfileArity { expected: self.actions.len(), found: pattern.len() });
        }
        let layout = self.layout();
        for idx in 0..layout.num_profiles {
            let p = layout.profile(idx);
            if pattern.iter().zip(&p.0).all(|(want, got)| want.map_or(true, |w| w == *got)) {
                self.set(s, &p, succ)?;
            }
        }
        Ok(())
    }

    /// Deletes an entry; used to build deliberately broken tables.
    pub fn remove(&mut self, s: StateId, p: &ActionProfile) {
        let layout = self.layout();
        if s.0 < self.states.len() && check_profile(&self.actions, p).is_ok() {
            self.table[s.0 * layout.num_profiles + layout.index(p)] = None;
        }
    }

    pub fn build(self) -> GameStructure {
        let layout = self.layout();
        GameStructure {
            states: self.states,
            initial: self.initial,
            actions: self.actions,
            layout,
            table: self.table,
            conflicts: self.conflicts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Layout {
    num_profiles: usize,
    num_env_profiles: usize,
    agent0_actions: usize,
    env_radix: Vec<usize>,
}

impl Layout {
    fn new(actions: &[Vec<String>]) -> Self {
        let env_radix: Vec<usize> = actions.iter().skip(1).map(Vec::len).collect();
        let agent0_actions = actions.first().map_or(0, Vec::len);
        let num_env_profiles = env_radix.iter().product();
        Layout { num_profiles: agent0_actions * num_env_profiles, num_env_profiles, agent0_actions, env_radix }
    }

    fn env_index(&self, env: &[ActionId]) -> usize {
        env.iter().zip(&self.env_radix).rev().fold(0, |acc, (a, r)| acc * r + a.0)
    }

    fn env(&self, mut idx: usize) -> Vec<ActionId> {
        self.env_radix
            .iter()
            .map(|r| {
                let a = idx % r;
                idx /= r;
                ActionId(a)
            })
            .collect()
    }

    fn index(&self, p: &ActionProfile) -> usize {
        p.0[0].0 + self.agent0_actions * self.env_index(&p.0[1..])
    }

    fn profile(&self, idx: usize) -> ActionProfile {
        ActionProfile::join(ActionId(idx % self.agent0_actions), &self.env(idx / self.agent0_actions))
    }
}

fn check_profile(actions: &[Vec<String>], p: &ActionProfile) -> Result<(), GameError> {
    if p.0.len() != actions.len() {
        return Err(GameError::ProfileArity { expected: actions.len(), found: p.0.len() });
    }
    for (agent, (a, acts)) in p.0.iter().zip(actions).enumerate() {
        if a.0 >= acts.len() {
            return Err(GameError::UnknownAction { agent, action: a.0 });
        }
    }
    Ok(())
}

/// Immutable concurrent game structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameStructure {
    states: Vec<String>,
    initial: StateId,
    actions: Vec<Vec<String>>,
    layout: Layout,
    table: Vec<Option<StateId>>,
    conflicts: Vec<Defect>,
}

impl GameStructure {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Number of agents including agent 0, i.e. `n + 1`.
    pub fn num_agents(&self) -> usize {
        self.actions.len()
    }

    /// Number of environment agents `n`.
    pub fn num_env(&self) -> usize {
        self.actions.len().saturating_sub(1)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn num_actions(&self, agent: usize) -> usize {
        self.actions[agent].len()
    }

    pub fn action_names(&self, agent: usize) -> &[String] {
        &self.actions[agent]
    }

    pub fn action_name(&self, agent: usize, a: ActionId) -> &str {
        &self.actions[agent][a.0]
    }

    pub fn action_by_name(&self, agent: usize, name: &str) -> Option<ActionId> {
        self.actions.get(agent)?.iter().position(|n| n == name).map(ActionId)
    }

    pub fn num_profiles(&self) -> usize {
        self.layout.num_profiles
    }

    /// Number of environment profiles `|Act_1 x .. x Act_n|`.
    pub fn num_env_profiles(&self) -> usize {
        self.layout.num_env_profiles
    }

    pub fn env_index(&self, env: &[ActionId]) -> usize {
        self.layout.env_index(env)
    }

    pub fn env_profile(&self, idx: usize) -> Vec<ActionId> {
        self.layout.env(idx)
    }

    pub fn profile_index(&self, p: &ActionProfile) -> usize {
        self.layout.index(p)
    }

    pub fn profile(&self, idx: usize) -> ActionProfile {
        self.layout.profile(idx)
    }

    pub fn profiles(&self) -> impl Iterator<Item = ActionProfile> + '_ {
        (0..self.layout.num_profiles).map(|i| self.layout.profile(i))
    }

    /// Checked `Tab(s, p)`.
    pub fn successor(&self, s: StateId, p: &ActionProfile) -> Result<StateId, GameError> {
        if s.0 >= self.states.len() {
            return Err(GameError::UnknownState(s.0));
        }
        check_profile(&self.actions, p)?;
        self.table[s.0 * self.layout.num_profiles + self.layout.index(p)]
            .ok_or_else(|| GameError::MissingTransition { state: s.0, profile: p.0.iter().map(|a| a.0).collect() })
    }

    /// `Tab(s, (a0, env))` with `env` given by its index. Requires a valid game.
    pub fn tab(&self, s: StateId, a0: ActionId, env_idx: usize) -> StateId {
        let idx = a0.0 + self.layout.agent0_actions * env_idx;
        self.table[s.0 * self.layout.num_profiles + idx].expect("transition table is total")
    }

    pub fn profile_to_string(&self, p: &ActionProfile) -> String {
        let names: Vec<&str> = p.0.iter().enumerate().map(|(i, a)| self.action_name(i, *a)).collect();
        format!("({})", names.join(","))
    }

    pub fn env_to_string(&self, env: &[ActionId]) -> String {
        let names: Vec<&str> = env.iter().enumerate().map(|(i, a)| self.action_name(i + 1, *a)).collect();
        format!("({})", names.join(","))
    }
}

/// Reports every totality, determinism and closure defect of `g`.
pub fn validate_game(g: &GameStructure) -> ValidationReport {
    let mut defects = Vec::new();
    if g.states.is_empty() {
        defects.push(Defect::NoStates);
    }
    if g.initial.0 >= g.states.len() {
        defects.push(Defect::InitialOutOfRange { initial: g.initial });
    }
    for (agent, acts) in g.actions.iter().enumerate() {
        if acts.is_empty() {
            defects.push(Defect::EmptyActionSet { agent: AgentId(agent) });
        }
    }
    if g.actions.is_empty() {
        defects.push(Defect::EmptyActionSet { agent: AgentId(0) });
    }
    if !defects.is_empty() {
        return ValidationReport { defects };
    }
    for s in g.states() {
        for idx in 0..g.layout.num_profiles {
            match g.table[s.0 * g.layout.num_profiles + idx] {
                None => defects.push(Defect::MissingTransition { state: s, profile: g.profile(idx) }),
                Some(t) if t.0 >= g.states.len() => {
                    defects.push(Defect::DanglingSuccessor { state: s, profile: g.profile(idx), successor: t })
                }
                Some(_) => {}
            }
        }
    }
    defects.extend(g.conflicts.iter().cloned());
    ValidationReport { defects }
}
