//! Eve's positional strategies, agent 0's finite-memory strategies, and the
//! translations between game histories and arena histories.

use std::collections::HashMap;

use thiserror::Error;

use crate::arena::{AdamMove, Arena, ArenaMove, ArenaState, Layer, Round};
use crate::game::{ActionId, ActionProfile, GameStructure, StateId};
use crate::play::History;
use crate::reductions::ParityArena;
use crate::solvers::{Player, WinRegion};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("the initial arena node is not winning for Eve: unrealizable")]
    Unrealizable,
    #[error("history is not compatible with the strategy at round {round}")]
    Incompatible { round: usize },
    #[error("history does not follow the transition table at round {round}")]
    InvalidHistory { round: usize },
    #[error("arena history is malformed at step {step}")]
    Malformed { step: usize },
    #[error("strategy machine is inconsistent with the game at memory node {node}")]
    Inconsistent { node: usize },
}

/// A total positional strategy of Eve on a parity arena.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EveStrategy {
    /// `choice[v]` is defined on every Eve node.
    pub choice: Vec<Option<usize>>,
}

impl EveStrategy {
    /// Eve's winning moves, completed with the first successor elsewhere.
    pub fn from_region(arena: &ParityArena, region: &WinRegion) -> Self {
        let g = &arena.game;
        let choice = (0..g.len())
            .map(|v| match g.owner[v] {
                Player::Eve => Some(region.eve_strategy[v].unwrap_or(g.succ[v][0])),
                Player::Adam => None,
            })
            .collect();
        EveStrategy { choice }
    }

    pub fn next(&self, v: usize) -> usize {
        self.choice[v].expect("Eve node")
    }

    /// Rewrites proposals greedily, in breadth-first order from the initial
    /// node: each layer-C node switches to the successor with the fewest
    /// proposals that keeps the strategy winning. Proposals that Adam refuses
    /// on the main line put agents in `D` needlessly, which shows up in
    /// agent 0's strategy as punishment after harmless signals. At most
    /// `budget` candidate switches are tried.
    pub fn simplify(&mut self, arena: &ParityArena, budget: usize) {
        let g = &arena.game;
        let proposals = |u: usize| match &arena.nodes[u].base.round {
            Round::Proposed(_, _, c) => c.env.iter().filter(|x| x.is_some()).count(),
            _ => 0,
        };
        let mut tries = 0;
        let mut seen = vec![false; g.len()];
        let mut queue = std::collections::VecDeque::from([g.initial]);
        seen[g.initial] = true;
        while let Some(v) = queue.pop_front() {
            if arena.nodes[v].base.layer() == Layer::C {
                let current = self.next(v);
                let mut better: Vec<usize> = g.succ[v].iter().copied().filter(|&u| proposals(u) < proposals(current)).collect();
                better.sort_by_key(|&u| proposals(u));
                for u in better {
                    if tries == budget {
                        break;
                    }
                    tries += 1;
                    self.choice[v] = Some(u);
                    if crate::solvers::strategy_wins(g, &self.choice, g.initial) {
                        break;
                    }
                    self.choice[v] = Some(current);
                }
            }
            let next: Vec<usize> = match self.choice[v] {
                Some(u) => vec![u],
                None => g.succ[v].clone(),
            };
            for u in next {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
}

/// One arena round per game round, starting and ending in A-states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaHistory {
    pub start: ArenaState,
    pub steps: Vec<(ArenaMove, ArenaState)>,
}

impl ArenaHistory {
    /// The A-states of the history, in order.
    pub fn a_states(&self) -> Vec<&ArenaState> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, q)| q)).filter(|q| q.layer() == Layer::A).collect()
    }
}

/// Plays one game round from A-node `v`: Eve moves, Adam plays `env` in
/// layer B, Eve proposes, and Adam confirms `env` in layer D.
/// Returns the nodes visited after `v` (B, C, D and the next A-node).
pub fn lift_round(arena: &Arena<'_>, pa: &ParityArena, sigma: &EveStrategy, v: usize, env: &[ActionId]) -> [usize; 4] {
    let vb = sigma.next(v);
    let vc = pa
        .find_successor(vb, |q| matches!(&q.round, Round::Played(_, b) if b.env == env))
        .expect("every environment profile is playable in layer B");
    let vd = sigma.next(vc);
    let Round::Proposed(a, b, c) = &pa.nodes[vd].base.round else { panic!("Eve's layer-C move leads to layer D") };
    let q = &pa.nodes[vd].base;
    let d = AdamMove { env: env.to_vec() };
    let (s, w, dd) = arena.resolve(q.state, q.w, q.d, a, b, c, &d);
    let va = pa
        .find_successor(vd, |t| t.layer() == Layer::A && t.state == s && t.w == w && t.d == dd)
        .expect("confirming the layer-B profile is always legal");
    [vb, vc, vd, va]
}

/// The arena history induced by `h` under `sigma`; `h` must follow the
/// agent-0 actions `sigma` prescribes.
pub fn lift_history(arena: &Arena<'_>, pa: &ParityArena, sigma: &EveStrategy, h: &History) -> Result<ArenaHistory, StrategyError> {
    let g = arena.game();
    if h.states.first() != Some(&g.initial()) {
        return Err(StrategyError::InvalidHistory { round: 0 });
    }
    let mut v = pa.initial();
    let mut out = ArenaHistory { start: pa.nodes[v].base.clone(), steps: Vec::new() };
    for (round, p) in h.profiles.iter().enumerate() {
        if g.successor(h.states[round], p).ok() != Some(h.states[round + 1]) {
            return Err(StrategyError::InvalidHistory { round });
        }
        let vb = sigma.next(v);
        let a = pa.nodes[vb].base.eve_move_a().expect("layer B").clone();
        if a.agent0 != p.agent0() {
            return Err(StrategyError::Incompatible { round });
        }
        let nodes = lift_round(arena, pa, sigma, v, p.env());
        let d = AdamMove { env: p.env().to_vec() };
        let Round::Proposed(_, _, c) = &pa.nodes[nodes[2]].base.round else { unreachable!("layer D") };
        let moves = [ArenaMove::EveA(a), ArenaMove::Adam(d.clone()), ArenaMove::EveC(c.clone()), ArenaMove::Adam(d)];
        for (m, node) in moves.into_iter().zip(nodes) {
            out.steps.push((m, pa.nodes[node].base.clone()));
        }
        v = nodes[3];
    }
    Ok(out)
}

/// Replaces every arena round by the profile `(ā[0], d̄)`.
pub fn project_history(arena: &Arena<'_>, h: &ArenaHistory) -> Result<History, StrategyError> {
    if h.start.layer() != Layer::A || h.steps.len() % 4 != 0 {
        return Err(StrategyError::Malformed { step: 0 });
    }
    let mut out = History::new(h.start.state);
    let mut q = &h.start;
    let mut agent0 = None;
    for (k, (m, next)) in h.steps.iter().enumerate() {
        if arena.step(q, m).ok().as_ref() != Some(next) {
            return Err(StrategyError::Malformed { step: k });
        }
        match (k % 4, m) {
            (0, ArenaMove::EveA(a)) => agent0 = Some(a.agent0),
            (3, ArenaMove::Adam(d)) => out.push(ActionProfile::join(agent0.expect("layer A move precedes"), &d.env), next.state),
            _ => {}
        }
        q = next;
    }
    Ok(out)
}

/// A node of agent 0's strategy machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryNode {
    /// Current game state; determined by the memory.
    pub state: StateId,
    /// Agent 0's action at this node.
    pub action: ActionId,
    /// Human-readable description (the arena A-node it tracks).
    pub label: String,
}

/// A finite-memory strategy for agent 0 that observes environment profiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma0 {
    pub nodes: Vec<MemoryNode>,
    pub initial: usize,
    /// `next[m][e]`: memory after environment profile index `e` at `m`.
    pub next: Vec<Vec<usize>>,
}

impl Sigma0 {
    /// The strategy playing `actions[s]` at state `s`, with no other memory.
    pub fn memoryless(g: &GameStructure, actions: &[ActionId]) -> Self {
        let nodes = g.states().map(|s| MemoryNode { state: s, action: actions[s.0], label: g.state_name(s).to_string() }).collect();
        let next = g.states().map(|s| (0..g.num_env_profiles()).map(|e| g.tab(s, actions[s.0], e).0).collect()).collect();
        Sigma0 { nodes, initial: g.initial().0, next }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn action(&self, m: usize) -> ActionId {
        self.nodes[m].action
    }

    pub fn state(&self, m: usize) -> StateId {
        self.nodes[m].state
    }

    pub fn update(&self, m: usize, env_idx: usize) -> usize {
        self.next[m][env_idx]
    }

    /// Memory after `h`; fails if `h` deviates from agent 0's actions.
    pub fn run(&self, g: &GameStructure, h: &History) -> Result<usize, StrategyError> {
        let mut m = self.initial;
        if h.states.first() != Some(&self.nodes[m].state) {
            return Err(StrategyError::InvalidHistory { round: 0 });
        }
        for (round, p) in h.profiles.iter().enumerate() {
            if g.successor(h.states[round], p).ok() != Some(h.states[round + 1]) {
                return Err(StrategyError::InvalidHistory { round });
            }
            if p.agent0() != self.action(m) {
                return Err(StrategyError::Incompatible { round });
            }
            m = self.update(m, g.env_index(p.env()));
        }
        Ok(m)
    }

    /// `σ0(h)`.
    pub fn decide(&self, g: &GameStructure, h: &History) -> Result<ActionId, StrategyError> {
        self.run(g, h).map(|m| self.action(m))
    }

    /// Checks that memory updates follow the transition table.
    pub fn validate(&self, g: &GameStructure) -> Result<(), StrategyError> {
        for m in 0..self.len() {
            if self.next[m].len() != g.num_env_profiles() || self.action(m).0 >= g.num_actions(0) {
                return Err(StrategyError::Inconsistent { node: m });
            }
            for (e, &t) in self.next[m].iter().enumerate() {
                if t >= self.len() || self.state(t) != g.tab(self.state(m), self.action(m), e) {
                    return Err(StrategyError::Inconsistent { node: m });
                }
            }
        }
        if self.initial >= self.len() || self.state(self.initial) != g.initial() {
            return Err(StrategyError::Inconsistent { node: self.initial });
        }
        Ok(())
    }

    /// Memory nodes reachable from the initial node, in discovery order.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut k = 0;
        while k < order.len() {
            for &t in &self.next[order[k]] {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            k += 1;
        }
        order
    }
}

/// Agent 0's strategy read off Eve's strategy: memory is the arena A-node,
/// output is the agent-0 part of Eve's layer-A move, and an observed
/// environment profile is played as both Adam moves of the round.
pub fn derive_sigma0(arena: &Arena<'_>, pa: &ParityArena, sigma: &EveStrategy, eve_wins_initial: bool) -> Result<Sigma0, StrategyError> {
    if !eve_wins_initial {
        return Err(StrategyError::Unrealizable);
    }
    let g = arena.game();
    let mut ids: HashMap<usize, usize> = HashMap::from([(pa.initial(), 0)]);
    let mut order = vec![pa.initial()];
    let mut next = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        let mut row = Vec::with_capacity(g.num_env_profiles());
        for e in 0..g.num_env_profiles() {
            let va = lift_round(arena, pa, sigma, v, &g.env_profile(e))[3];
            let id = *ids.entry(va).or_insert_with(|| {
                order.push(va);
                order.len() - 1
            });
            row.push(id);
        }
        next.push(row);
        k += 1;
    }
    let nodes = order
        .iter()
        .map(|&v| {
            let q = &pa.nodes[v];
            let action = pa.nodes[sigma.next(v)].base.eve_move_a().expect("layer B").agent0;
            MemoryNode { state: q.base.state, action, label: describe(g, q) }
        })
        .collect();
    Ok(Sigma0 { nodes, initial: 0, next })
}

fn describe(g: &GameStructure, q: &crate::reductions::AugmentedState) -> String {
    use crate::reductions::Annotation;
    let base = q.base.display(g).to_string();
    match &q.extra {
        Annotation::ReachSafe { p } => format!("{base} P={p}"),
        Annotation::Buchi { c_d, c_w, b } => {
            let c = |c: &Option<usize>| c.map_or("-1".to_string(), |i| i.to_string());
            format!("{base} cD={} cW={} b={}", c(c_d), c(c_w), u8::from(*b))
        }
        Annotation::CoBuchi => base,
        Annotation::Muller { record, hit } => {
            let m: Vec<&str> = record.iter().map(|&s| g.state_name(s)).collect();
            format!("{base} m=[{}] h={hit}", m.join(","))
        }
    }
}
