//! Compilation of the arena plus an objective profile into a parity game.
//!
//! Every class adds an annotation to arena states and assigns priorities
//! (least priority seen infinitely often must be even for Eve):
//!
//! * reach/safe: the set `P` of agents whose prefix-dependent objective is
//!   already decided; A-nodes get 0 when the Büchi condition `F` holds.
//! * Büchi: round-robin counters over `D` and `W` plus a bit tracking
//!   agent 0's visits; priorities 0..=4.
//! * co-Büchi: no annotation; priorities in `{1, 2, 3, 4, 6}`.
//! * Muller: a latest appearance record `(m, h)`; priorities `2h`/`2h+1`.
//!
//! Annotations change only on edges entering A-nodes. Non-A nodes get a
//! priority at least as large as every A-node priority, so that loops are
//! decided at A-nodes.

use std::collections::{HashMap, VecDeque};

use log::{debug, warn};
use thiserror::Error;

use crate::arena::{AdamRule, Arena, ArenaMove, ArenaState, Layer};
use crate::formula::Formula;
use crate::game::{validate_game, AgentSet, GameStructure, StateId};
use crate::objective::{Objective, ObjectiveClass, ObjectiveProfile, StateSet};
use crate::solvers::{ParityGame, Player};

/// Agent index, or `None` for "no agent awaited" (printed as -1).
pub type Counter = Option<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Annotation {
    ReachSafe { p: AgentSet },
    Buchi { c_d: Counter, c_w: Counter, b: bool },
    CoBuchi,
    Muller { record: Vec<StateId>, hit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AugmentedState {
    pub base: ArenaState,
    pub extra: Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("objective class {0} cannot be compiled; encode it as a Muller formula")]
    UnsupportedClass(ObjectiveClass),
    #[error("game is not complete and deterministic")]
    InvalidGame,
    #[error("objective profile was built for a different game")]
    ProfileMismatch,
    #[error("parity arena exceeds {limit} nodes")]
    TooLarge { limit: usize },
}

/// `P0`: the agents whose target contains the initial state.
pub fn reach_augment_initial(g: &GameStructure, objs: &ObjectiveProfile) -> AgentSet {
    reach_update_p(&initial_probe(g), AgentSet::EMPTY, objs)
}

fn initial_probe(g: &GameStructure) -> ArenaState {
    Arena::new(g).initial()
}

fn agents_where(objs: &ObjectiveProfile, pred: impl Fn(&StateSet) -> bool) -> AgentSet {
    AgentSet::from_agents((0..objs.len()).filter(|&i| objs.get(i).set().is_some_and(&pred)))
}

/// Adds the agents whose target contains the state of an A-node.
pub fn reach_update_p(next: &ArenaState, p: AgentSet, objs: &ObjectiveProfile) -> AgentSet {
    if next.layer() != Layer::A {
        return p;
    }
    p.union(agents_where(objs, |t| t.contains(next.state.0)))
}

/// Adds the agents for which the state of an A-node is unsafe.
pub fn safe_update_p(next: &ArenaState, p: AgentSet, objs: &ObjectiveProfile) -> AgentSet {
    if next.layer() != Layer::A {
        return p;
    }
    p.union(agents_where(objs, |t| !t.contains(next.state.0)))
}

/// `F^R = (0 ∈ P ∨ D \ P ≠ ∅) ∧ W ⊆ P` on A-nodes.
pub fn reach_priority(q: &ArenaState, p: AgentSet) -> u32 {
    let accept = q.layer() == Layer::A && (p.contains(0) || !q.d.difference(p).is_empty()) && q.w.is_subset(p);
    u32::from(!accept)
}

/// `F^S = (0 ∉ P ∨ D ∩ P ≠ ∅) ∧ W ∩ P = ∅` on A-nodes.
pub fn safe_priority(q: &ArenaState, p: AgentSet) -> u32 {
    let accept = q.layer() == Layer::A && (!p.contains(0) || !q.d.intersection(p).is_empty()) && q.w.intersection(p).is_empty();
    u32::from(!accept)
}

/// Least member of `set` strictly after `c` in cyclic order; `None` starts
/// the scan before the least agent.
pub fn next_in_cycle(set: AgentSet, c: Counter) -> Counter {
    let after = c.map_or(set, |c| AgentSet(set.0 & !((2u64 << c) - 1)));
    after.min().or_else(|| set.min())
}

fn buchi_set(objs: &ObjectiveProfile, i: usize) -> &StateSet {
    objs.get(i).set().expect("set-based objective")
}

/// Counter update on an edge into an A-node with sets `w_next`, `d_next`.
///
/// `credited` is the state of the A-node the round started from: the
/// awaited agent is credited for it before the counter moves on, which is
/// what makes `c = min D` together with a visit of `F_c` mean "every agent
/// of `D` was served since the last time".
pub fn buchi_update_counters(
    credited: StateId,
    w_next: AgentSet,
    d_next: AgentSet,
    c_d: Counter,
    c_w: Counter,
    objs: &ObjectiveProfile,
) -> (Counter, Counter) {
    let served = |c: Counter| c.map_or(true, |i| buchi_set(objs, i).contains(credited.0));
    let advance = |set: AgentSet, c: Counter| {
        if set.is_empty() {
            None
        } else if served(c) || c.is_some_and(|i| !set.contains(i)) {
            next_in_cycle(set, c)
        } else {
            c
        }
    };
    (advance(d_next, c_d), advance(w_next, c_w))
}

fn in_t0(q: &ArenaState, objs: &ObjectiveProfile) -> bool {
    q.layer() == Layer::A && buchi_set(objs, 0).contains(q.state.0)
}

fn in_tx(q: &ArenaState, set: AgentSet, c: Counter, objs: &ObjectiveProfile) -> bool {
    q.layer() == Layer::A && (set.is_empty() || (c.is_some() && c == set.min() && buchi_set(objs, c.unwrap()).contains(q.state.0)))
}

/// Bit update when leaving the A-node `q` with counters `c_d`, `c_w`.
pub fn buchi_update_bit(q: &ArenaState, c_w: Counter, b: bool, objs: &ObjectiveProfile) -> bool {
    match b {
        false => in_t0(q, objs),
        true => !in_tx(q, q.w, c_w, objs),
    }
}

pub fn buchi_priority(q: &ArenaState, c_d: Counter, c_w: Counter, b: bool, objs: &ObjectiveProfile) -> u32 {
    if q.layer() != Layer::A {
        4
    } else if !b && in_t0(q, objs) {
        0
    } else if in_tx(q, q.d, c_d, objs) {
        1
    } else if in_tx(q, q.w, c_w, objs) {
        2
    } else {
        3
    }
}

/// Priority and whether the node falls in the case the four-way split does
/// not cover (outside `T_w` and `T_0`, inside `T_d`), which is given 2.
pub fn cobuchi_priority(q: &ArenaState, objs: &ObjectiveProfile) -> (u32, bool) {
    if q.layer() != Layer::A {
        return (6, false);
    }
    let hit = |set: AgentSet| set.iter().any(|i| buchi_set(objs, i).contains(q.state.0));
    let (tw, td, t0) = (hit(q.w), hit(q.d), buchi_set(objs, 0).contains(q.state.0));
    match (tw, td, t0) {
        (true, _, _) => (1, false),
        (false, true, true) => (2, false),
        (false, false, true) => (3, false),
        (false, false, false) => (4, false),
        (false, true, false) => (2, true),
    }
}

/// Moves `s` to the back of the record; the new hit is its old position.
pub fn lar_step(record: &[StateId], s: StateId) -> (Vec<StateId>, usize) {
    let pos = record.iter().position(|&x| x == s).expect("record is a permutation of the states");
    let mut next = Vec::with_capacity(record.len());
    next.extend_from_slice(&record[..pos]);
    next.extend_from_slice(&record[pos + 1..]);
    next.push(s);
    (next, pos)
}

/// The initial record: declaration order with the initial state last.
pub fn lar_initial(g: &GameStructure) -> (Vec<StateId>, usize) {
    let mut record: Vec<StateId> = g.states().filter(|&s| s != g.initial()).collect();
    record.push(g.initial());
    let hit = record.len() - 1;
    (record, hit)
}

fn muller_formula(objs: &ObjectiveProfile, i: usize) -> &Formula {
    match objs.get(i) {
        Objective::Muller(f) => f,
        _ => panic!("muller class"),
    }
}

pub fn muller_priority(q: &ArenaState, record: &[StateId], hit: usize, objs: &ObjectiveProfile, num_states: usize) -> u32 {
    if q.layer() != Layer::A {
        return 2 * num_states as u32 + 2;
    }
    let tail = crate::objective::state_set(num_states, record[hit..].iter().copied());
    let holds = |i: usize| muller_formula(objs, i).eval(&tail);
    let accept = q.w.iter().all(holds) && (holds(0) || q.d.iter().any(|i| !holds(i)));
    2 * hit as u32 + u32::from(!accept)
}

/// Annotation and priority bookkeeping of one objective class.
#[derive(Clone, Debug)]
pub struct Compiler<'a> {
    arena: Arena<'a>,
    objs: &'a ObjectiveProfile,
}

impl<'a> Compiler<'a> {
    pub fn new(arena: Arena<'a>, objs: &'a ObjectiveProfile) -> Result<Self, ReductionError> {
        if !ObjectiveClass::SOLVABLE.contains(&objs.class()) {
            return Err(ReductionError::UnsupportedClass(objs.class()));
        }
        if objs.len() != arena.game().num_agents() {
            return Err(ReductionError::ProfileMismatch);
        }
        Ok(Compiler { arena, objs })
    }

    pub fn arena(&self) -> &Arena<'a> {
        &self.arena
    }

    pub fn initial(&self) -> AugmentedState {
        let g = self.arena.game();
        let base = self.arena.initial();
        let extra = match self.objs.class() {
            ObjectiveClass::Reach => Annotation::ReachSafe { p: reach_update_p(&base, AgentSet::EMPTY, self.objs) },
            ObjectiveClass::Safe => Annotation::ReachSafe { p: safe_update_p(&base, AgentSet::EMPTY, self.objs) },
            ObjectiveClass::Buchi => Annotation::Buchi { c_d: None, c_w: None, b: false },
            ObjectiveClass::CoBuchi => Annotation::CoBuchi,
            ObjectiveClass::Muller => {
                let (record, hit) = lar_initial(g);
                Annotation::Muller { record, hit }
            }
            ObjectiveClass::Parity => unreachable!("rejected in new"),
        };
        AugmentedState { base, extra }
    }

    /// The annotated successor of `from` whose arena part is `next`.
    pub fn advance(&self, from: &AugmentedState, next: ArenaState) -> AugmentedState {
        if next.layer() != Layer::A {
            return AugmentedState { base: next, extra: from.extra.clone() };
        }
        let extra = match &from.extra {
            Annotation::ReachSafe { p } => Annotation::ReachSafe {
                p: match self.objs.class() {
                    ObjectiveClass::Reach => reach_update_p(&next, *p, self.objs),
                    _ => safe_update_p(&next, *p, self.objs),
                },
            },
            Annotation::Buchi { c_d, c_w, b } => {
                // `from` is the D-node of the round; it carries the round's
                // source state, sets and counters.
                let source = ArenaState { round: crate::arena::Round::Start, ..from.base.clone() };
                let b = buchi_update_bit(&source, *c_w, *b, self.objs);
                let (c_d, c_w) = buchi_update_counters(source.state, next.w, next.d, *c_d, *c_w, self.objs);
                Annotation::Buchi { c_d, c_w, b }
            }
            Annotation::CoBuchi => Annotation::CoBuchi,
            Annotation::Muller { record, .. } => {
                let (record, hit) = lar_step(record, next.state);
                Annotation::Muller { record, hit }
            }
        };
        AugmentedState { base: next, extra }
    }

    /// Priority and the co-Büchi uncovered-case flag.
    pub fn priority(&self, q: &AugmentedState) -> (u32, bool) {
        let ns = self.arena.game().num_states();
        match &q.extra {
            Annotation::ReachSafe { p } => match self.objs.class() {
                ObjectiveClass::Reach => (reach_priority(&q.base, *p), false),
                _ => (safe_priority(&q.base, *p), false),
            },
            Annotation::Buchi { c_d, c_w, b } => (buchi_priority(&q.base, *c_d, *c_w, *b, self.objs), false),
            Annotation::CoBuchi => cobuchi_priority(&q.base, self.objs),
            Annotation::Muller { record, hit } => (muller_priority(&q.base, record, *hit, self.objs, ns), false),
        }
    }

    pub fn successors(&self, q: &AugmentedState) -> Vec<(ArenaMove, AugmentedState)> {
        self.arena.successors(&q.base).into_iter().map(|(m, next)| (m, self.advance(q, next))).collect()
    }
}

/// The explicit reachable parity game of an instance.
#[derive(Clone, Debug)]
pub struct ParityArena {
    pub game: ParityGame,
    pub nodes: Vec<AugmentedState>,
    index: HashMap<AugmentedState, usize>,
    pub class: ObjectiveClass,
    pub rule: AdamRule,
    pub num_states: usize,
    pub num_agents: usize,
    /// co-Büchi nodes given priority 2 by the uncovered case.
    pub uncovered: usize,
}

impl ParityArena {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_of(&self, q: &AugmentedState) -> Option<usize> {
        self.index.get(q).copied()
    }

    pub fn initial(&self) -> usize {
        self.game.initial
    }

    /// The successor of `v` whose arena part satisfies `pred`.
    pub fn find_successor(&self, v: usize, pred: impl Fn(&ArenaState) -> bool) -> Option<usize> {
        self.game.succ[v].iter().copied().find(|&u| pred(&self.nodes[u].base))
    }

    pub fn count_layer(&self, layer: Layer) -> usize {
        self.nodes.iter().filter(|q| q.base.layer() == layer).count()
    }
}

pub const DEFAULT_NODE_LIMIT: usize = 5_000_000;

pub fn build_parity_arena(g: &GameStructure, objs: &ObjectiveProfile) -> Result<ParityArena, ReductionError> {
    build_parity_arena_with(Arena::new(g), objs, DEFAULT_NODE_LIMIT)
}

/// Breadth-first construction of the reachable augmented arena.
pub fn build_parity_arena_with(arena: Arena<'_>, objs: &ObjectiveProfile, limit: usize) -> Result<ParityArena, ReductionError> {
    if !validate_game(arena.game()).is_ok() {
        return Err(ReductionError::InvalidGame);
    }
    let compiler = Compiler::new(arena, objs)?;
    let init = compiler.initial();
    let mut nodes = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let mut out = Vec::new();
        for (_, next) in compiler.successors(&nodes[v]) {
            let u = match index.get(&next) {
                Some(&u) => u,
                None => {
                    if nodes.len() >= limit {
                        return Err(ReductionError::TooLarge { limit });
                    }
                    let u = nodes.len();
                    index.insert(next.clone(), u);
                    nodes.push(next);
                    succ.push(Vec::new());
                    queue.push_back(u);
                    u
                }
            };
            if !out.contains(&u) {
                out.push(u);
            }
        }
        succ[v] = out;
    }
    let mut uncovered = 0;
    let (mut owner, mut priority) = (Vec::with_capacity(nodes.len()), Vec::with_capacity(nodes.len()));
    for q in &nodes {
        let (p, flagged) = compiler.priority(q);
        uncovered += usize::from(flagged);
        priority.push(p);
        owner.push(if q.base.is_eve() { Player::Eve } else { Player::Adam });
    }
    if uncovered > 0 {
        warn!("{uncovered} co-Büchi nodes fall outside the four priority cases; assigned priority 2");
    }
    debug!("parity arena: {} nodes, class {}", nodes.len(), objs.class());
    Ok(ParityArena {
        game: ParityGame { owner, priority, succ, initial: 0 },
        nodes,
        index,
        class: objs.class(),
        rule: arena.rule(),
        num_states: arena.game().num_states(),
        num_agents: arena.game().num_agents(),
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Round;
    use crate::examples::figure1;
    use crate::game::{ActionId, GameBuilder};
    use crate::objective::state_set;

    fn a_node(s: usize, w: &[usize], d: &[usize]) -> ArenaState {
        ArenaState {
            state: StateId(s),
            w: AgentSet::from_agents(w.iter().copied()),
            d: AgentSet::from_agents(d.iter().copied()),
            round: Round::Start,
        }
    }

    fn b_node(s: usize) -> ArenaState {
        ArenaState { round: Round::Chosen(crate::arena::EveMoveA { agent0: ActionId(0), env: vec![None, None] }), ..a_node(s, &[], &[]) }
    }

    /// Three states, two environment agents; `sets[i]` is agent i's set.
    fn three_state(class: fn(StateSet) -> Objective, sets: [&[usize]; 3]) -> (GameStructure, ObjectiveProfile) {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let mut b = GameBuilder::new(names(&["s0", "s1", "s2"]), StateId(0), vec![names(&["x"]), names(&["a"]), names(&["a"])]);
        for s in 0..3 {
            b.set_pattern(StateId(s), &[None, None, None], StateId((s + 1) % 3)).unwrap();
        }
        let g = b.build();
        let objs = sets.iter().map(|m| class(state_set(3, m.iter().map(|&s| StateId(s))))).collect();
        let objs = ObjectiveProfile::new(&g, objs).unwrap();
        (g, objs)
    }

    #[test]
    fn reach_p_updates() {
        let (g, objs) = figure1();
        assert_eq!(reach_augment_initial(&g, &objs), AgentSet::EMPTY);
        let t01 = g.state_by_name("T01").unwrap().0;
        let s2 = g.state_by_name("s2").unwrap().0;
        assert_eq!(reach_update_p(&a_node(t01, &[], &[]), AgentSet::EMPTY, &objs), AgentSet::from_agents([0, 1]));
        assert_eq!(reach_update_p(&b_node(t01), AgentSet::singleton(2), &objs), AgentSet::singleton(2));
        let p01 = AgentSet::from_agents([0, 1]);
        assert_eq!(reach_update_p(&a_node(s2, &[], &[]), p01, &objs), p01);
        let (g, objs) = three_state(Objective::Reach, [&[0], &[], &[1]]);
        assert_eq!(reach_augment_initial(&g, &objs), AgentSet::singleton(0));
        let (g, objs) = three_state(Objective::Reach, [&[0], &[0], &[0]]);
        assert_eq!(reach_augment_initial(&g, &objs), AgentSet::from_agents([0, 1, 2]));
    }

    #[test]
    fn safe_p_updates() {
        let (_, objs) = three_state(Objective::Safe, [&[0, 1, 2], &[0, 1, 2], &[0, 2]]);
        assert_eq!(safe_update_p(&a_node(1, &[], &[]), AgentSet::EMPTY, &objs), AgentSet::singleton(2));
        let (_, objs) = three_state(Objective::Safe, [&[0, 2], &[0, 2], &[0, 1, 2]]);
        assert_eq!(safe_update_p(&a_node(1, &[], &[]), AgentSet::singleton(2), &objs), AgentSet::from_agents([0, 1, 2]));
        let (_, objs) = three_state(Objective::Safe, [&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]]);
        for s in 0..3 {
            assert_eq!(safe_update_p(&a_node(s, &[], &[]), AgentSet::EMPTY, &objs), AgentSet::EMPTY);
        }
    }

    #[test]
    fn reach_and_safe_priorities() {
        let t01 = a_node(3, &[1], &[]);
        assert_eq!(reach_priority(&t01, AgentSet::from_agents([0, 1])), 0);
        assert_eq!(reach_priority(&a_node(2, &[], &[1]), AgentSet::EMPTY), 0);
        assert_eq!(reach_priority(&a_node(2, &[], &[]), AgentSet::EMPTY), 1);
        assert_eq!(reach_priority(&b_node(2), AgentSet::singleton(0)), 1);
        assert_eq!(safe_priority(&a_node(0, &[2], &[1]), AgentSet::EMPTY), 0);
        assert_eq!(safe_priority(&a_node(0, &[], &[]), AgentSet::singleton(0)), 1);
        assert_eq!(safe_priority(&a_node(0, &[], &[1]), AgentSet::from_agents([0, 1])), 0);
    }

    #[test]
    fn cyclic_scan() {
        let set = AgentSet::from_agents([1, 3]);
        assert_eq!(next_in_cycle(set, None), Some(1));
        assert_eq!(next_in_cycle(set, Some(1)), Some(3));
        assert_eq!(next_in_cycle(set, Some(3)), Some(1));
        assert_eq!(next_in_cycle(set, Some(2)), Some(3));
        assert_eq!(next_in_cycle(AgentSet::EMPTY, Some(2)), None);
    }

    #[test]
    fn buchi_counters() {
        let (_, objs) = three_state(Objective::Buchi, [&[], &[1], &[2]]);
        let s0 = StateId(0);
        let any_w = AgentSet::EMPTY;
        assert_eq!(buchi_update_counters(s0, any_w, AgentSet::EMPTY, Some(2), None, &objs).0, None);
        assert_eq!(buchi_update_counters(s0, any_w, AgentSet::singleton(2), None, None, &objs).0, Some(2));
        assert_eq!(buchi_update_counters(s0, AgentSet::singleton(2), AgentSet::singleton(1), None, Some(1), &objs).1, Some(2));
        // Awaited agent not served: the counter stays.
        let d = AgentSet::from_agents([1, 2]);
        assert_eq!(buchi_update_counters(s0, any_w, d, Some(1), None, &objs).0, Some(1));
        // Served by the state the round started from: move on.
        assert_eq!(buchi_update_counters(StateId(1), any_w, d, Some(1), None, &objs).0, Some(2));
    }

    #[test]
    fn buchi_bit_and_priority() {
        let (_, objs) = three_state(Objective::Buchi, [&[0], &[1], &[2]]);
        let s0 = a_node(0, &[], &[]);
        assert!(buchi_update_bit(&s0, None, false, &objs));
        let s1w = a_node(1, &[2], &[]);
        assert!(buchi_update_bit(&s1w, Some(2), true, &objs));
        assert!(!buchi_update_bit(&a_node(1, &[], &[]), None, false, &objs));
        assert_eq!(buchi_priority(&s0, None, None, false, &objs), 0);
        let s0wd = a_node(0, &[2], &[1]);
        assert_eq!(buchi_priority(&s0wd, Some(1), Some(2), true, &objs), 3);
        assert_eq!(buchi_priority(&b_node(0), None, None, false, &objs), 4);
    }

    #[test]
    fn cobuchi_priorities() {
        let (_, objs) = three_state(Objective::CoBuchi, [&[0], &[1], &[2]]);
        assert_eq!(cobuchi_priority(&a_node(0, &[], &[]), &objs), (3, false));
        assert_eq!(cobuchi_priority(&a_node(1, &[1], &[]), &objs), (1, false));
        assert_eq!(cobuchi_priority(&b_node(0), &objs), (6, false));
        assert_eq!(cobuchi_priority(&a_node(2, &[], &[2]), &objs), (2, true));
        assert_eq!(cobuchi_priority(&a_node(1, &[], &[]), &objs), (4, false));
    }

    #[test]
    fn lar_steps() {
        let m: Vec<StateId> = [0, 1, 2].map(StateId).to_vec();
        assert_eq!(lar_step(&m, StateId(1)), ([0, 2, 1].map(StateId).to_vec(), 1));
        assert_eq!(lar_step(&m, StateId(2)), (m.clone(), 2));
        assert_eq!(lar_step(&m, StateId(0)), ([1, 2, 0].map(StateId).to_vec(), 0));
    }

    #[test]
    fn muller_priorities() {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let mut b = GameBuilder::new(names(&["s0", "s1", "s2"]), StateId(0), vec![names(&["x"])]);
        for s in 0..3 {
            b.set_pattern(StateId(s), &[None], StateId(s)).unwrap();
        }
        let g = b.build();
        let record = [0, 2, 1].map(StateId).to_vec();
        let q = a_node(0, &[], &[]);
        let objs = ObjectiveProfile::new(&g, vec![Objective::Muller(Formula::atom(StateId(2)))]).unwrap();
        assert_eq!(muller_priority(&q, &record, 1, &objs, 3), 2);
        let objs = ObjectiveProfile::new(&g, vec![Objective::Muller(Formula::atom(StateId(0)))]).unwrap();
        assert_eq!(muller_priority(&q, &record, 1, &objs, 3), 3);
        assert_eq!(muller_priority(&b_node(0), &record, 1, &objs, 5), 12);
    }

    #[test]
    fn figure1_arena_root() {
        let (g, objs) = figure1();
        let pa = build_parity_arena(&g, &objs).unwrap();
        let root = &pa.nodes[pa.initial()];
        assert_eq!(root.base, Arena::new(&g).initial());
        assert_eq!(root.extra, Annotation::ReachSafe { p: AgentSet::EMPTY });
        assert_eq!(pa.game.priority[pa.initial()], 1);
        assert!(pa.game.succ.iter().all(|s| !s.is_empty()));
    }

    #[test]
    fn parity_class_is_rejected() {
        let (g, _) = figure1();
        let objs = ObjectiveProfile::new(&g, vec![Objective::Parity(vec![0; 5]); 3]).unwrap();
        assert_eq!(build_parity_arena(&g, &objs).unwrap_err(), ReductionError::UnsupportedClass(ObjectiveClass::Parity));
    }

    #[test]
    fn empty_buchi_sets_have_no_priority_zero() {
        let (g, objs) = three_state(Objective::Buchi, [&[], &[], &[]]);
        let pa = build_parity_arena(&g, &objs).unwrap();
        assert!(pa.game.priority.iter().all(|&p| p != 0));
    }
}
