//! Certification of agent 0's strategies.
//!
//! A strategy is a solution iff every play consistent with it either meets
//! agent 0's objective or has a good deviation point: a round at which some
//! agent that loses the play could have changed its own action and then won
//! against every behaviour of the other environment agents.
//!
//! Everything is decided on the product of the game with the strategy's
//! memory. For each agent `i` a zero-sum game "i against the coalition" is
//! solved once; a round is a good deviation point for `i` iff some action of
//! `i` leads into its winning region. A violating play is a reachable cycle
//! of the product, restricted to rounds that are not good deviation points
//! for the agents it makes lose, along which agent 0 loses.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::game::{ActionId, ActionProfile, GameStructure, StateId};
use crate::objective::{Objective, ObjectiveClass, ObjectiveProfile};
use crate::play::{History, LassoPlay, Step};
use crate::reductions::lar_step;
use crate::solvers::{zielonka_solve, ParityGame, Player};

use super::strategy::{Sigma0, StrategyError};

/// A play on which agent 0 loses and no losing agent has a good deviation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub play: LassoPlay,
    /// Environment agents that lose the play.
    pub losing: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub valid: bool,
    pub counterexample: Option<Counterexample>,
}

/// Per-agent bookkeeping that depends on the prefix of a play.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Aux {
    None,
    /// Reach: target visited. Safe: unsafe state visited.
    Flag(bool),
    /// Index into the interned appearance records.
    Record(usize),
}

/// The zero-sum game of one environment agent against the coalition.
struct AgentGame {
    index: HashMap<(usize, Aux), usize>,
    winning: FixedBitSet,
    /// Nodes from which every play meets `i`'s objective, whoever moves.
    certain: FixedBitSet,
}

pub struct Checker<'a> {
    g: &'a GameStructure,
    objs: &'a ObjectiveProfile,
    sigma: &'a Sigma0,
    records: Vec<(Vec<StateId>, usize)>,
    record_ids: HashMap<(Vec<StateId>, usize), usize>,
    games: Vec<Option<AgentGame>>,
}

impl<'a> Checker<'a> {
    pub fn new(g: &'a GameStructure, objs: &'a ObjectiveProfile, sigma: &'a Sigma0) -> Result<Self, StrategyError> {
        sigma.validate(g)?;
        let mut c = Checker { g, objs, sigma, records: Vec::new(), record_ids: HashMap::new(), games: Vec::new() };
        c.games = (0..g.num_agents()).map(|_| None).collect();
        Ok(c)
    }

    fn objective(&self, i: usize) -> &'a Objective {
        self.objs.get(i)
    }

    fn intern(&mut self, rec: (Vec<StateId>, usize)) -> usize {
        if let Some(&id) = self.record_ids.get(&rec) {
            return id;
        }
        self.records.push(rec.clone());
        self.record_ids.insert(rec, self.records.len() - 1);
        self.records.len() - 1
    }

    /// Bookkeeping for agent `i` at the start of a play in state `s`.
    fn aux_start(&mut self, i: usize, s: StateId) -> Aux {
        match self.objective(i) {
            Objective::Reach(t) => Aux::Flag(t.contains(s.0)),
            Objective::Safe(t) => Aux::Flag(!t.contains(s.0)),
            Objective::Muller(_) | Objective::Parity(_) => {
                let mut record: Vec<StateId> = self.g.states().filter(|&x| x != s).collect();
                record.push(s);
                let hit = record.len() - 1;
                Aux::Record(self.intern((record, hit)))
            }
            Objective::Buchi(_) | Objective::CoBuchi(_) => Aux::None,
        }
    }

    /// Bookkeeping after entering state `s`.
    fn aux_step(&mut self, i: usize, aux: Aux, s: StateId) -> Aux {
        match (self.objective(i), aux) {
            (Objective::Reach(t), Aux::Flag(f)) => Aux::Flag(f || t.contains(s.0)),
            (Objective::Safe(t), Aux::Flag(f)) => Aux::Flag(f || !t.contains(s.0)),
            (_, Aux::Record(r)) => {
                let next = lar_step(&self.records[r].0, s);
                Aux::Record(self.intern(next))
            }
            (_, aux) => aux,
        }
    }

    /// Priority for agent `i` (even is good for `i`) at state `s`.
    fn priority(&self, i: usize, s: StateId, aux: Aux) -> u32 {
        match (self.objective(i), aux) {
            (Objective::Reach(_), Aux::Flag(f)) => u32::from(!f),
            (Objective::Safe(_), Aux::Flag(f)) => u32::from(f),
            (Objective::Buchi(t), _) => u32::from(!t.contains(s.0)),
            (Objective::CoBuchi(t), _) => 2 - u32::from(t.contains(s.0)),
            (obj, Aux::Record(r)) => {
                let (record, hit) = &self.records[r];
                let tail = crate::objective::state_set(self.g.num_states(), record[*hit..].iter().copied());
                let holds = match obj {
                    Objective::Muller(f) => f.eval(&tail),
                    other => other.holds(&tail, &tail),
                };
                2 * *hit as u32 + u32::from(!holds)
            }
            _ => unreachable!("aux matches the objective"),
        }
    }

    /// Solves agent `i`'s zero-sum game over all memory nodes.
    fn agent_game(&mut self, i: usize) -> &AgentGame {
        if self.games[i].is_none() {
            let built = self.build_agent_game(i);
            self.games[i] = Some(built);
        }
        self.games[i].as_ref().expect("just built")
    }

    fn build_agent_game(&mut self, i: usize) -> AgentGame {
        let (g, sigma) = (self.g, self.sigma);
        let mut game = ParityGame::default();
        let mut index: HashMap<(usize, Aux), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let push = |game: &mut ParityGame, owner: Player, prio: u32| {
            game.owner.push(owner);
            game.priority.push(prio);
            game.succ.push(Vec::new());
            game.len() - 1
        };
        for m in 0..sigma.len() {
            let mut keys = vec![(m, self.aux_start(i, sigma.state(m)))];
            if let Aux::Flag(_) = keys[0].1 {
                keys = vec![(m, Aux::Flag(false)), (m, Aux::Flag(true))];
            }
            for key in keys {
                if let Entry::Vacant(slot) = index.entry(key) {
                    slot.insert(push(&mut game, Player::Eve, self.priority(i, sigma.state(m), key.1)));
                    queue.push_back(key);
                }
            }
        }
        while let Some((m, aux)) = queue.pop_front() {
            let v = index[&(m, aux)];
            let prio = game.priority[v];
            for x in 0..g.num_actions(i) {
                let c = push(&mut game, Player::Adam, prio);
                game.succ[v].push(c);
                for e in (0..g.num_env_profiles()).filter(|&e| g.env_profile(e)[i - 1].0 == x) {
                    let t = sigma.update(m, e);
                    let aux2 = self.aux_step(i, aux, sigma.state(t));
                    let u = match index.get(&(t, aux2)) {
                        Some(&u) => u,
                        None => {
                            let u = push(&mut game, Player::Eve, self.priority(i, sigma.state(t), aux2));
                            index.insert((t, aux2), u);
                            queue.push_back((t, aux2));
                            u
                        }
                    };
                    if !game.succ[c].contains(&u) {
                        game.succ[c].push(u);
                    }
                }
            }
        }
        game.initial = 0;
        let region = zielonka_solve(&game);
        game.owner.fill(Player::Adam);
        let certain = zielonka_solve(&game).eve_nodes;
        AgentGame { index, winning: region.eve_nodes, certain }
    }

    /// Can agent `i` win after the round at memory `m` is played with `e`
    /// altered to some action of `i`? `aux` is `i`'s bookkeeping before the
    /// round. Returns the least such action.
    fn deviation(&mut self, m: usize, aux: Aux, e: usize, i: usize) -> Option<ActionId> {
        let env = self.g.env_profile(e);
        for x in 0..self.g.num_actions(i) {
            let mut dev = env.clone();
            dev[i - 1] = ActionId(x);
            let t = self.sigma.update(m, self.g.env_index(&dev));
            let aux2 = self.aux_step(i, aux, self.sigma.state(t));
            let game = self.agent_game(i);
            if game.winning.contains(game.index[&(t, aux2)]) {
                return Some(ActionId(x));
            }
        }
        None
    }

    /// The least action with which agent `i` turns the last round of `h`
    /// into a good deviation point, or `None`. Also `None` when every
    /// continuation of `h` meets `i`'s objective: `i` cannot lose the play.
    pub fn deviator(&mut self, h: &History, i: usize) -> Result<Option<ActionId>, StrategyError> {
        assert!(i >= 1 && i < self.g.num_agents(), "deviator is defined for environment agents");
        self.sigma.run(self.g, h)?;
        let Some(k) = h.rounds().checked_sub(1) else {
            return Ok(None);
        };
        let before = h.prefix(k);
        let m = self.sigma.run(self.g, &before)?;
        let mut aux = self.aux_start(i, before.states[0]);
        for &s in &before.states[1..] {
            aux = self.aux_step(i, aux, s);
        }
        let e = self.g.env_index(h.profiles[k].env());
        let t = self.sigma.update(m, e);
        let actual = self.aux_step(i, aux, self.sigma.state(t));
        let game = self.agent_game(i);
        if game.certain.contains(game.index[&(t, actual)]) {
            // Every continuation of h meets i's objective, so i does not lose.
            return Ok(None);
        }
        Ok(self.deviation(m, aux, e, i))
    }

    /// The shortest prefix of `h` that is a good deviation point for `i`.
    pub fn root(&mut self, h: &History, i: usize) -> Result<Option<History>, StrategyError> {
        for k in 1..=h.rounds() {
            let prefix = h.prefix(k);
            if self.deviator(&prefix, i)?.is_some() {
                return Ok(Some(prefix));
            }
        }
        Ok(None)
    }

    /// Searches for a play violating the solution condition.
    pub fn check(&mut self) -> CheckReport {
        let n = self.g.num_env();
        for losing in 0u64..1 << n {
            let losing: Vec<usize> = (1..=n).filter(|i| losing >> (i - 1) & 1 == 1).collect();
            if let Some(play) = self.bad_play(&losing) {
                return CheckReport { valid: false, counterexample: Some(Counterexample { play, losing }) };
            }
        }
        CheckReport { valid: true, counterexample: None }
    }

    /// A play on which agent 0 loses, exactly the agents in `losing` lose,
    /// and no round is a good deviation point for an agent in `losing`.
    fn bad_play(&mut self, losing: &[usize]) -> Option<LassoPlay> {
        let (g, sigma) = (self.g, self.sigma);
        let agents = g.num_agents();
        let prefix_aux = |me: &mut Self, auxes: &[Aux], s: StateId| -> Vec<Aux> {
            (0..agents).map(|i| if matches!(auxes[i], Aux::Flag(_)) { me.aux_step(i, auxes[i], s) } else { Aux::None }).collect()
        };
        // Only the prefix flags matter for the cycle search; records are
        // used inside the agent games.
        let s0 = sigma.state(sigma.initial);
        let start: Vec<Aux> = (0..agents)
            .map(|i| match self.aux_start(i, s0) {
                f @ Aux::Flag(_) => f,
                _ => Aux::None,
            })
            .collect();
        let mut graph: DiGraph<(usize, Vec<Aux>), usize> = DiGraph::new();
        let mut ids: HashMap<(usize, Vec<Aux>), NodeIndex> = HashMap::new();
        let root = graph.add_node((sigma.initial, start.clone()));
        ids.insert((sigma.initial, start), root);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let (m, auxes) = graph[v].clone();
            for e in 0..g.num_env_profiles() {
                let blocked = losing.iter().any(|&i| {
                    let aux_i = if matches!(auxes[i], Aux::Flag(_)) { auxes[i] } else { Aux::None };
                    let aux_i = match aux_i {
                        Aux::None => self.aux_start(i, sigma.state(m)),
                        f => f,
                    };
                    self.deviation(m, aux_i, e, i).is_some()
                });
                if blocked {
                    continue;
                }
                let t = sigma.update(m, e);
                let key = (t, prefix_aux(self, &auxes, sigma.state(t)));
                let u = *ids.entry(key.clone()).or_insert_with(|| {
                    let u = graph.add_node(key);
                    queue.push_back(u);
                    u
                });
                graph.add_edge(v, u, e);
            }
        }
        let cond = |me: &Self, auxes: &[Aux], inf: &FixedBitSet| {
            let wins = |i: usize| match (me.objective(i), auxes[i]) {
                (Objective::Reach(_), Aux::Flag(f)) => f,
                (Objective::Safe(_), Aux::Flag(f)) => !f,
                (o, _) => o.holds(inf, inf),
            };
            !wins(0) && (1..agents).all(|i| wins(i) != losing.contains(&i))
        };
        let all: Vec<NodeIndex> = graph.node_indices().collect();
        let found = self.find_cycle(&graph, &all, &cond, &mut HashSet::new())?;
        Some(self.lasso(&graph, root, &found))
    }

    /// A set of nodes forming a strongly connected subgraph whose state set
    /// satisfies `cond`.
    fn find_cycle(
        &self,
        graph: &DiGraph<(usize, Vec<Aux>), usize>,
        nodes: &[NodeIndex],
        cond: &dyn Fn(&Self, &[Aux], &FixedBitSet) -> bool,
        seen: &mut HashSet<Vec<NodeIndex>>,
    ) -> Option<Vec<NodeIndex>> {
        let keep: HashSet<NodeIndex> = nodes.iter().copied().collect();
        let sub = graph.filter_map(|v, w| keep.contains(&v).then(|| (v, w.clone())), |_, e| Some(*e));
        for comp in tarjan_scc(&sub) {
            let trivial = comp.len() == 1 && sub.find_edge(comp[0], comp[0]).is_none();
            if trivial {
                continue;
            }
            let mut comp: Vec<NodeIndex> = comp.iter().map(|&c| sub[c].0).collect();
            comp.sort_unstable();
            if !seen.insert(comp.clone()) {
                continue;
            }
            let states = crate::objective::state_set(self.g.num_states(), comp.iter().map(|&v| self.sigma.state(graph[v].0)));
            if cond(self, &graph[comp[0]].1, &states) {
                return Some(comp);
            }
            if states.count_ones(..) > 1 && !matches!(self.objs.class(), ObjectiveClass::Reach | ObjectiveClass::Safe) {
                for s in states.ones() {
                    let rest: Vec<NodeIndex> = comp.iter().copied().filter(|&v| self.sigma.state(graph[v].0).0 != s).collect();
                    if let Some(found) = self.find_cycle(graph, &rest, cond, seen) {
                        return Some(found);
                    }
                }
            }
        }
        None
    }

    /// A lasso from `root` that loops through every node of `comp`.
    fn lasso(&self, graph: &DiGraph<(usize, Vec<Aux>), usize>, root: NodeIndex, comp: &[NodeIndex]) -> LassoPlay {
        let inside: HashSet<NodeIndex> = comp.iter().copied().collect();
        let prefix = shortest_path(graph, root, |u| inside.contains(&u), |_| true, false);
        let entry = prefix.1;
        let mut cycle = Vec::new();
        let mut at = entry;
        for &target in comp {
            if target != at {
                let (edges, _) = shortest_path(graph, at, |u| u == target, |u| inside.contains(&u), false);
                cycle.extend(edges);
                at = target;
            }
        }
        cycle.extend(shortest_path(graph, at, |u| u == entry, |u| inside.contains(&u), true).0);
        let to_step = |&(v, e): &(NodeIndex, usize)| {
            let m = graph[v].0;
            Step { state: self.sigma.state(m), profile: ActionProfile::join(self.sigma.action(m), &self.g.env_profile(e)) }
        };
        LassoPlay { prefix: prefix.0.iter().map(to_step).collect(), cycle: cycle.iter().map(to_step).collect() }
    }
}

/// Breadth-first path from `from` to a node satisfying `goal`, through nodes
/// satisfying `within`. Edges are returned as (source, weight). With
/// `nonempty`, the path has at least one edge even if `from` is a goal.
fn shortest_path<N>(
    graph: &DiGraph<N, usize>,
    from: NodeIndex,
    goal: impl Fn(NodeIndex) -> bool,
    within: impl Fn(NodeIndex) -> bool,
    nonempty: bool,
) -> (Vec<(NodeIndex, usize)>, NodeIndex) {
    use petgraph::visit::EdgeRef;
    if !nonempty && goal(from) {
        return (Vec::new(), from);
    }
    let mut prev: HashMap<NodeIndex, (NodeIndex, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for edge in graph.edges(v) {
            let u = edge.target();
            if !within(u) {
                continue;
            }
            if goal(u) {
                let mut path = vec![(v, *edge.weight())];
                let mut x = v;
                while x != from {
                    let (p, w) = prev[&x];
                    path.push((p, w));
                    x = p;
                }
                path.reverse();
                return (path, u);
            }
            if u != from && !prev.contains_key(&u) {
                prev.insert(u, (v, *edge.weight()));
                queue.push_back(u);
            }
        }
    }
    unreachable!("goal is reachable")
}

pub fn check_solution(g: &GameStructure, objs: &ObjectiveProfile, sigma: &Sigma0) -> Result<CheckReport, StrategyError> {
    Ok(Checker::new(g, objs, sigma)?.check())
}

pub fn deviator(
    g: &GameStructure,
    objs: &ObjectiveProfile,
    sigma: &Sigma0,
    h: &History,
    i: usize,
) -> Result<Option<ActionId>, StrategyError> {
    Checker::new(g, objs, sigma)?.deviator(h, i)
}

pub fn root(g: &GameStructure, objs: &ObjectiveProfile, sigma: &Sigma0, h: &History, i: usize) -> Result<Option<History>, StrategyError> {
    Checker::new(g, objs, sigma)?.root(h, i)
}
