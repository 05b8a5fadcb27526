//! The turn-based Eve/Adam arena built on top of a concurrent game.
//!
//! A round has four layers. In layer A Eve fixes agent 0's action and the
//! actions of the agents in `W`; in layer B Adam plays an environment
//! profile; in layer C Eve proposes deviations for the agents outside
//! `W ∪ D`; in layer D Adam resolves the round. Agents whose proposal is
//! taken join `W`, agents who refuse a proposal or leave `W` join `D`.
//!
//! Invariants on every reachable state: `0 ∉ W ∪ D`, `W ∩ D = ∅`, `D` only
//! grows, and an agent that leaves `W` is in `D` from then on.

use std::fmt;

use thiserror::Error;

use crate::game::{ActionId, AgentSet, GameStructure, StateId};
use crate::objective::{state_set, ObjectiveProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    A,
    B,
    C,
    D,
}

/// Agent 0's action plus, for every environment agent, an action iff it is in `W`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EveMoveA {
    pub agent0: ActionId,
    /// `env[i - 1]` belongs to agent `i`.
    pub env: Vec<Option<ActionId>>,
}

/// Deviation proposals; `None` for no proposal, forced on `W ∪ D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EveMoveC {
    pub env: Vec<Option<ActionId>>,
}

/// A full environment profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdamMove {
    pub env: Vec<ActionId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArenaMove {
    EveA(EveMoveA),
    Adam(AdamMove),
    EveC(EveMoveC),
}

/// Moves played so far in the current round; determines the layer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Round {
    Start,
    Chosen(EveMoveA),
    Played(EveMoveA, AdamMove),
    Proposed(EveMoveA, AdamMove, EveMoveC),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArenaState {
    pub state: StateId,
    pub w: AgentSet,
    pub d: AgentSet,
    pub round: Round,
}

impl ArenaState {
    pub fn layer(&self) -> Layer {
        match self.round {
            Round::Start => Layer::A,
            Round::Chosen(..) => Layer::B,
            Round::Played(..) => Layer::C,
            Round::Proposed(..) => Layer::D,
        }
    }

    pub fn is_eve(&self) -> bool {
        matches!(self.layer(), Layer::A | Layer::C)
    }

    pub fn eve_move_a(&self) -> Option<&EveMoveA> {
        match &self.round {
            Round::Start => None,
            Round::Chosen(a) | Round::Played(a, _) | Round::Proposed(a, _, _) => Some(a),
        }
    }

    pub fn display<'a>(&'a self, g: &'a GameStructure) -> impl fmt::Display + 'a {
        ShownState { q: self, g }
    }
}

struct ShownState<'a> {
    q: &'a ArenaState,
    g: &'a GameStructure,
}

fn show_opt(g: &GameStructure, agent0: Option<ActionId>, env: &[Option<ActionId>]) -> String {
    let mut parts: Vec<String> = agent0.map(|a| g.action_name(0, a).to_string()).into_iter().collect();
    parts.extend(env.iter().enumerate().map(|(k, a)| a.map_or("-".to_string(), |a| g.action_name(k + 1, a).to_string())));
    format!("({})", parts.join(","))
}

impl fmt::Display for ShownState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (q, g) = (self.q, self.g);
        write!(f, "({},{},{}", g.state_name(q.state), q.w, q.d)?;
        if let Some(a) = q.eve_move_a() {
            write!(f, ",{}", show_opt(g, Some(a.agent0), &a.env))?;
        }
        if let Round::Played(_, b) | Round::Proposed(_, b, _) = &q.round {
            write!(f, ",{}", g.env_to_string(&b.env))?;
        }
        if let Round::Proposed(_, _, c) = &q.round {
            write!(f, ",{}", show_opt(g, None, &c.env))?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("move is not legal in the current arena state")]
    IllegalMove,
    #[error("arena lasso is not connected by legal moves at position {index}")]
    Disconnected { index: usize },
    #[error("arena lasso loop is empty")]
    EmptyLoop,
    #[error("W or D changes along an arena loop")]
    NonConstantLoop,
}

/// Which environment profiles Adam may play in layer D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdamRule {
    /// Any profile, as in the unrestricted construction. With this rule
    /// Adam can void every proposal by changing two coordinates at once.
    Unrestricted,
    /// Either confirm the layer-B profile or switch exactly one agent to its
    /// proposed deviation.
    ProposalsOnly,
}

/// The arena of a validated game.
#[derive(Clone, Copy, Debug)]
pub struct Arena<'g> {
    game: &'g GameStructure,
    rule: AdamRule,
}

/// All combinations picking one entry from each option list, first list
/// varying fastest.
fn product<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let total: usize = options.iter().map(Vec::len).product();
    (0..total)
        .map(|mut idx| {
            options
                .iter()
                .map(|o| {
                    let v = o[idx % o.len()].clone();
                    idx /= o.len();
                    v
                })
                .collect()
        })
        .collect()
}

impl<'g> Arena<'g> {
    pub fn new(game: &'g GameStructure) -> Self {
        Arena { game, rule: AdamRule::ProposalsOnly }
    }

    pub fn with_rule(game: &'g GameStructure, rule: AdamRule) -> Self {
        Arena { game, rule }
    }

    pub fn game(&self) -> &'g GameStructure {
        self.game
    }

    pub fn rule(&self) -> AdamRule {
        self.rule
    }

    pub fn initial(&self) -> ArenaState {
        ArenaState { state: self.game.initial(), w: AgentSet::EMPTY, d: AgentSet::EMPTY, round: Round::Start }
    }

    fn env_actions(&self, agent: usize) -> Vec<ActionId> {
        (0..self.game.num_actions(agent)).map(ActionId).collect()
    }

    /// All environment profiles in index order.
    pub fn adam_profiles(&self) -> Vec<AdamMove> {
        (0..self.game.num_env_profiles()).map(|e| AdamMove { env: self.game.env_profile(e) }).collect()
    }

    pub fn legal_moves(&self, q: &ArenaState) -> Vec<ArenaMove> {
        let n = self.game.num_env();
        match &q.round {
            Round::Start => {
                let mut options: Vec<Vec<Option<ActionId>>> = vec![self.env_actions(0).into_iter().map(Some).collect()];
                for i in 1..=n {
                    options.push(if q.w.contains(i) { self.env_actions(i).into_iter().map(Some).collect() } else { vec![None] });
                }
                product(&options)
                    .into_iter()
                    .map(|v| ArenaMove::EveA(EveMoveA { agent0: v[0].expect("agent 0 acts"), env: v[1..].to_vec() }))
                    .collect()
            }
            Round::Chosen(_) => self.adam_profiles().into_iter().map(ArenaMove::Adam).collect(),
            Round::Played(..) => {
                let busy = q.w.union(q.d);
                let options: Vec<Vec<Option<ActionId>>> = (1..=n)
                    .map(|i| {
                        let mut o = vec![None];
                        if !busy.contains(i) {
                            o.extend(self.env_actions(i).into_iter().map(Some));
                        }
                        o
                    })
                    .collect();
                product(&options).into_iter().map(|env| ArenaMove::EveC(EveMoveC { env })).collect()
            }
            Round::Proposed(_, b, c) => match self.rule {
                AdamRule::Unrestricted => self.adam_profiles().into_iter().map(ArenaMove::Adam).collect(),
                AdamRule::ProposalsOnly => {
                    let mut moves = vec![ArenaMove::Adam(b.clone())];
                    for (k, prop) in c.env.iter().enumerate() {
                        if let Some(x) = *prop {
                            if x != b.env[k] {
                                let mut env = b.env.clone();
                                env[k] = x;
                                moves.push(ArenaMove::Adam(AdamMove { env }));
                            }
                        }
                    }
                    moves
                }
            },
        }
    }

    pub fn is_legal(&self, q: &ArenaState, m: &ArenaMove) -> bool {
        let n = self.game.num_env();
        let acts = |i: usize, a: ActionId| a.0 < self.game.num_actions(i);
        let full = |env: &[ActionId]| env.len() == n && env.iter().enumerate().all(|(k, &a)| acts(k + 1, a));
        match (&q.round, m) {
            (Round::Start, ArenaMove::EveA(a)) => {
                acts(0, a.agent0)
                    && a.env.len() == n
                    && a.env.iter().enumerate().all(|(k, x)| match x {
                        Some(x) => q.w.contains(k + 1) && acts(k + 1, *x),
                        None => !q.w.contains(k + 1),
                    })
            }
            (Round::Chosen(_), ArenaMove::Adam(b)) => full(&b.env),
            (Round::Played(..), ArenaMove::EveC(c)) => {
                let busy = q.w.union(q.d);
                c.env.len() == n && c.env.iter().enumerate().all(|(k, x)| x.map_or(true, |x| !busy.contains(k + 1) && acts(k + 1, x)))
            }
            (Round::Proposed(_, b, c), ArenaMove::Adam(d)) => {
                full(&d.env)
                    && match self.rule {
                        AdamRule::Unrestricted => true,
                        AdamRule::ProposalsOnly => {
                            let diff: Vec<usize> = (0..n).filter(|&k| d.env[k] != b.env[k]).collect();
                            match diff.as_slice() {
                                [] => true,
                                [k] => c.env[*k] == Some(d.env[*k]),
                                _ => false,
                            }
                        }
                    }
            }
            _ => false,
        }
    }

    pub fn step(&self, q: &ArenaState, m: &ArenaMove) -> Result<ArenaState, ArenaError> {
        if !self.is_legal(q, m) {
            return Err(ArenaError::IllegalMove);
        }
        Ok(self.step_unchecked(q, m))
    }

    /// `step` without the legality check.
    pub fn step_unchecked(&self, q: &ArenaState, m: &ArenaMove) -> ArenaState {
        let round = match (&q.round, m) {
            (Round::Start, ArenaMove::EveA(a)) => Round::Chosen(a.clone()),
            (Round::Chosen(a), ArenaMove::Adam(b)) => Round::Played(a.clone(), b.clone()),
            (Round::Played(a, b), ArenaMove::EveC(c)) => Round::Proposed(a.clone(), b.clone(), c.clone()),
            (Round::Proposed(a, b, c), ArenaMove::Adam(d)) => {
                let (state, w, d) = self.resolve(q.state, q.w, q.d, a, b, c, d);
                return ArenaState { state, w, d, round: Round::Start };
            }
            _ => panic!("move kind does not match the layer"),
        };
        ArenaState { state: q.state, w: q.w, d: q.d, round }
    }

    /// Layer-D update: the next game state and the new `W`, `D`.
    #[allow(clippy::too_many_arguments)]
    pub fn resolve(
        &self,
        s: StateId,
        w: AgentSet,
        d: AgentSet,
        a: &EveMoveA,
        b: &AdamMove,
        c: &EveMoveC,
        dd: &AdamMove,
    ) -> (StateId, AgentSet, AgentSet) {
        let next = self.game.tab(s, a.agent0, self.game.env_index(&dd.env));
        let n = dd.env.len();
        let others_kept = |i: usize| (0..n).all(|k| k + 1 == i || dd.env[k] == b.env[k]);
        let (mut joined, mut refused, mut left) = (AgentSet::EMPTY, AgentSet::EMPTY, AgentSet::EMPTY);
        for i in 1..=n {
            let k = i - 1;
            if w.contains(i) {
                if a.env[k] != Some(dd.env[k]) {
                    left = left.with(i);
                }
            } else if !d.contains(i) {
                if let Some(x) = c.env[k] {
                    if others_kept(i) {
                        if dd.env[k] == x {
                            joined = joined.with(i);
                        } else {
                            refused = refused.with(i);
                        }
                    }
                }
            }
        }
        (next, w.union(joined).difference(left), d.union(left).union(refused))
    }

    /// Successors in `legal_moves` order.
    pub fn successors(&self, q: &ArenaState) -> Vec<(ArenaMove, ArenaState)> {
        self.legal_moves(q)
            .into_iter()
            .map(|m| {
                let next = self.step_unchecked(q, &m);
                (m, next)
            })
            .collect()
    }
}

/// A lasso of arena states, each followed by one of its successors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaLasso {
    pub prefix: Vec<ArenaState>,
    pub cycle: Vec<ArenaState>,
}

impl ArenaLasso {
    /// Checks connectivity and that `W`, `D` are constant on the loop.
    pub fn validate(&self, arena: &Arena<'_>) -> Result<(), ArenaError> {
        if self.cycle.is_empty() {
            return Err(ArenaError::EmptyLoop);
        }
        let all: Vec<&ArenaState> = self.prefix.iter().chain(&self.cycle).collect();
        for (k, q) in all.iter().enumerate() {
            let next = all.get(k + 1).copied().unwrap_or(&self.cycle[0]);
            if !arena.successors(q).iter().any(|(_, t)| t == next) {
                return Err(ArenaError::Disconnected { index: k });
            }
        }
        let (w, d) = (self.cycle[0].w, self.cycle[0].d);
        if self.cycle.iter().any(|q| q.w != w || q.d != d) {
            return Err(ArenaError::NonConstantLoop);
        }
        Ok(())
    }
}

/// Eve's winning condition `(S0 ∪ S_D) ∩ S_W` on an arena lasso.
pub fn eval_arena_objective(arena: &Arena<'_>, r: &ArenaLasso, objs: &ObjectiveProfile) -> Result<bool, ArenaError> {
    r.validate(arena)?;
    let ns = arena.game().num_states();
    let a_states = |v: &[ArenaState]| v.iter().filter(|q| q.layer() == Layer::A).map(|q| q.state).collect::<Vec<_>>();
    let loop_states = a_states(&r.cycle);
    let mut all_states = a_states(&r.prefix);
    all_states.extend(&loop_states);
    let (occ, inf) = (state_set(ns, all_states), state_set(ns, loop_states));
    let (w, d) = (r.cycle[0].w, r.cycle[0].d);
    let wins = |i: usize| objs.get(i).holds(&occ, &inf);
    Ok((wins(0) || d.iter().any(|i| !wins(i))) && w.iter().all(wins))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::figure1;

    fn act(i: usize) -> ActionId {
        ActionId(i)
    }

    const L: usize = 0;
    const R: usize = 1;
    const A: usize = 0;
    const B: usize = 1;

    fn q_d(g: &GameStructure) -> ArenaState {
        ArenaState {
            state: g.state_by_name("s1").unwrap(),
            w: AgentSet::EMPTY,
            d: AgentSet::EMPTY,
            round: Round::Proposed(
                EveMoveA { agent0: act(R), env: vec![None, None] },
                AdamMove { env: vec![act(B), act(B)] },
                EveMoveC { env: vec![Some(act(A)), None] },
            ),
        }
    }

    #[test]
    fn initial_state() {
        let (g, _) = figure1();
        let q = Arena::new(&g).initial();
        assert_eq!(q.layer(), Layer::A);
        assert_eq!(q.state, g.initial());
        assert!(q.w.is_empty() && q.d.is_empty());
        assert_eq!(q.display(&g).to_string(), "(s0,{},{})");
    }

    #[test]
    fn legal_move_counts() {
        let (g, _) = figure1();
        let arena = Arena::new(&g);
        let q0 = arena.initial();
        let moves = arena.legal_moves(&q0);
        assert_eq!(
            moves,
            vec![
                ArenaMove::EveA(EveMoveA { agent0: act(L), env: vec![None, None] }),
                ArenaMove::EveA(EveMoveA { agent0: act(R), env: vec![None, None] }),
            ]
        );
        let qb = arena.step(&q0, &moves[1]).unwrap();
        assert_eq!(arena.legal_moves(&qb).len(), 4);
        let qc = arena.step(&qb, &arena.legal_moves(&qb)[0]).unwrap();
        assert_eq!(arena.legal_moves(&qc).len(), 9);
        let mut busy = qc.clone();
        busy.w = AgentSet::singleton(1);
        assert_eq!(arena.legal_moves(&busy).len(), 3);
    }

    #[test]
    fn layer_d_updates() {
        let (g, _) = figure1();
        let arena = Arena::new(&g);
        let q = q_d(&g);
        let to = |d: [usize; 2]| arena.step(&q, &ArenaMove::Adam(AdamMove { env: vec![act(d[0]), act(d[1])] }));
        let accepted = to([A, B]).unwrap();
        assert_eq!((accepted.state, accepted.w, accepted.d), (g.state_by_name("T01").unwrap(), AgentSet::singleton(1), AgentSet::EMPTY));
        let refused = to([B, B]).unwrap();
        assert_eq!((refused.state, refused.w, refused.d), (g.state_by_name("s2").unwrap(), AgentSet::EMPTY, AgentSet::singleton(1)));
        assert_eq!(to([B, A]), Err(ArenaError::IllegalMove));
        let unrestricted = Arena::with_rule(&g, AdamRule::Unrestricted);
        let dodged = unrestricted.step(&q, &ArenaMove::Adam(AdamMove { env: vec![act(B), act(A)] })).unwrap();
        assert!(dodged.w.is_empty() && dodged.d.is_empty());
    }

    #[test]
    fn quiet_round_keeps_sets() {
        let (g, _) = figure1();
        let arena = Arena::new(&g);
        let mut q = q_d(&g);
        if let Round::Proposed(_, _, c) = &mut q.round {
            c.env = vec![None, None];
        }
        let next = arena.step(&q, &ArenaMove::Adam(AdamMove { env: vec![act(B), act(B)] })).unwrap();
        assert_eq!((next.w, next.d), (q.w, q.d));
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let (g, _) = figure1();
        let arena = Arena::new(&g);
        let q0 = arena.initial();
        let bad = ArenaMove::EveA(EveMoveA { agent0: act(L), env: vec![Some(act(A)), None] });
        assert_eq!(arena.step(&q0, &bad), Err(ArenaError::IllegalMove));
        assert_eq!(arena.step(&q0, &ArenaMove::Adam(AdamMove { env: vec![act(A), act(A)] })), Err(ArenaError::IllegalMove));
    }

    fn a_state(g: &GameStructure, s: &str, w: &[usize], d: &[usize]) -> ArenaState {
        ArenaState {
            state: g.state_by_name(s).unwrap(),
            w: AgentSet::from_agents(w.iter().copied()),
            d: AgentSet::from_agents(d.iter().copied()),
            round: Round::Start,
        }
    }

    /// A sink round at `q` in which every actor repeats the given choices.
    fn sink_round(arena: &Arena<'_>, q: &ArenaState, a0: usize) -> Vec<ArenaState> {
        let n = arena.game().num_env();
        let a = EveMoveA { agent0: act(a0), env: (1..=n).map(|i| q.w.contains(i).then_some(act(A))).collect() };
        let b = AdamMove { env: vec![act(A); n] };
        let c = EveMoveC { env: vec![None; n] };
        let qb = arena.step(q, &ArenaMove::EveA(a)).unwrap();
        let qc = arena.step(&qb, &ArenaMove::Adam(b)).unwrap();
        let qd = arena.step(&qc, &ArenaMove::EveC(c)).unwrap();
        vec![q.clone(), qb, qc, qd]
    }

    #[test]
    fn arena_objective_on_sink_loops() {
        let (g, objs) = figure1();
        let arena = Arena::new(&g);
        // Self-loops: T01 is a sink, s2 loops under agent 0's `r`.
        let t01 = a_state(&g, "T01", &[1], &[]);
        let r = ArenaLasso { prefix: vec![], cycle: sink_round(&arena, &t01, R) };
        assert!(eval_arena_objective(&arena, &r, &objs).unwrap());
        let s2d = a_state(&g, "s2", &[], &[1]);
        let r = ArenaLasso { prefix: vec![], cycle: sink_round(&arena, &s2d, R) };
        assert!(eval_arena_objective(&arena, &r, &objs).unwrap());
        let s2 = a_state(&g, "s2", &[], &[]);
        let r = ArenaLasso { prefix: vec![], cycle: sink_round(&arena, &s2, R) };
        assert!(!eval_arena_objective(&arena, &r, &objs).unwrap());
    }

    #[test]
    fn disconnected_lasso_is_rejected() {
        let (g, objs) = figure1();
        let arena = Arena::new(&g);
        let s2 = a_state(&g, "s2", &[], &[]);
        let mut cycle = sink_round(&arena, &s2, R);
        cycle.pop();
        let r = ArenaLasso { prefix: vec![], cycle };
        assert!(matches!(eval_arena_objective(&arena, &r, &objs), Err(ArenaError::Disconnected { .. })));
    }
}
