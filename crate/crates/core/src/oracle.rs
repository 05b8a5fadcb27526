//! Independent decision procedures for differential testing.
//!
//! [`brute_force_ncrsp`] re-expands the arena with its own encoding and
//! decides it without any priority encoding: `W`, `D` and the reach/safe
//! set `P` never return to an earlier value along a play, so the arena splits
//! into blocks ordered by `(|D|, |W|, |P|)`. Inside a block Eve's condition is
//! a fixed function of the set of game states seen infinitely often, and each
//! block is solved as a Muller game by the McNaughton-Zielonka recursion,
//! with exits replaced by sinks carrying the already computed winners.
//!
//! [`parity_by_enumeration`] decides small parity games by trying every
//! positional strategy of Eve.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::game::{GameStructure, StateId};
use crate::objective::{Objective, ObjectiveClass, ObjectiveProfile};
use crate::solvers::{ParityGame, Player};
use crate::synthesis::Answer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: more than {limit} arena nodes (stopped at {nodes})")]
    TooLarge { nodes: usize, limit: usize },
    #[error("objective class {0} is not supported by the oracle")]
    UnsupportedClass(ObjectiveClass),
    #[error("game is not complete and deterministic")]
    InvalidGame,
    #[error("too many positional strategies: {count} exceeds {limit}")]
    TooManyStrategies { count: u128, limit: u128 },
}

pub const ORACLE_NODE_LIMIT: usize = 400_000;

/// Arena node: the layer's data packed into small integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    /// State, W, D, P as bitmasks over agents.
    A { s: usize, w: u64, d: u64, p: u64 },
    /// Agent 0's action and the actions fixed for W (`acts[i]` for i in W).
    B { s: usize, w: u64, d: u64, p: u64, a0: usize, fixed: u64 },
    /// Plus the environment profile index Adam played.
    C { s: usize, w: u64, d: u64, p: u64, a0: usize, fixed: u64, b: usize },
    /// Plus the proposals, 0 for none and `x + 1` for action `x`.
    D { s: usize, w: u64, d: u64, p: u64, a0: usize, fixed: u64, b: usize, c: u64 },
}

const DIGIT: u32 = 8;

fn digit(packed: u64, i: usize) -> usize {
    ((packed >> (DIGIT * i as u32)) & 0xff) as usize
}

fn with_digit(packed: u64, i: usize, v: usize) -> u64 {
    (packed & !(0xff << (DIGIT * i as u32))) | ((v as u64) << (DIGIT * i as u32))
}

impl Node {
    fn block(&self) -> (u64, u64, u64) {
        match *self {
            Node::A { w, d, p, .. } | Node::B { w, d, p, .. } | Node::C { w, d, p, .. } | Node::D { w, d, p, .. } => (w, d, p),
        }
    }

    fn eve(&self) -> bool {
        matches!(self, Node::A { .. } | Node::C { .. })
    }
}

struct Expansion<'a> {
    g: &'a GameStructure,
    objs: &'a ObjectiveProfile,
    n: usize,
}

impl Expansion<'_> {
    fn has(mask: u64, i: usize) -> bool {
        mask >> i & 1 == 1
    }

    /// Agents for which entering `s` settles their reach/safe objective.
    fn settled(&self, s: usize) -> u64 {
        let mut out = 0;
        for i in 0..=self.n {
            let hit = match self.objs.get(i) {
                Objective::Reach(t) => t.contains(s),
                Objective::Safe(t) => !t.contains(s),
                _ => false,
            };
            if hit {
                out |= 1 << i;
            }
        }
        out
    }

    /// All mixed-radix vectors over `radix`, first entry fastest.
    fn vectors(radix: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &r in radix {
            out = (0..r).flat_map(|x| out.iter().map(move |v| [v.clone(), vec![x]].concat())).collect();
        }
        out
    }

    fn succ(&self, v: Node) -> Vec<Node> {
        let g = self.g;
        let n = self.n;
        match v {
            Node::A { s, w, d, p } => {
                let radix: Vec<usize> = (1..=n).map(|i| if Self::has(w, i) { g.num_actions(i) } else { 1 }).collect();
                let mut out = Vec::new();
                for a0 in 0..g.num_actions(0) {
                    for acts in Self::vectors(&radix) {
                        let fixed = acts.iter().enumerate().fold(0, |f, (k, &x)| with_digit(f, k + 1, x));
                        out.push(Node::B { s, w, d, p, a0, fixed });
                    }
                }
                out
            }
            Node::B { s, w, d, p, a0, fixed } => (0..g.num_env_profiles()).map(|b| Node::C { s, w, d, p, a0, fixed, b }).collect(),
            Node::C { s, w, d, p, a0, fixed, b } => {
                let radix: Vec<usize> = (1..=n).map(|i| if Self::has(w | d, i) { 1 } else { g.num_actions(i) + 1 }).collect();
                Self::vectors(&radix)
                    .into_iter()
                    .map(|props| {
                        let c = props.iter().enumerate().fold(0, |f, (k, &x)| with_digit(f, k + 1, x));
                        Node::D { s, w, d, p, a0, fixed, b, c }
                    })
                    .collect()
            }
            Node::D { s, w, d, p, a0, fixed, b, c } => {
                let played: Vec<usize> = g.env_profile(b).iter().map(|a| a.0).collect();
                // Adam confirms b, or grants exactly one proposal that differs from b.
                let mut options = vec![played.clone()];
                for i in 1..=n {
                    let prop = digit(c, i);
                    if prop > 0 && prop - 1 != played[i - 1] {
                        let mut alt = played.clone();
                        alt[i - 1] = prop - 1;
                        options.push(alt);
                    }
                }
                options
                    .into_iter()
                    .map(|dd| {
                        let (mut w2, mut d2) = (w, d);
                        for i in 1..=n {
                            if Self::has(w, i) {
                                if dd[i - 1] != digit(fixed, i) {
                                    w2 &= !(1 << i);
                                    d2 |= 1 << i;
                                }
                                continue;
                            }
                            let prop = digit(c, i);
                            if Self::has(d, i) || prop == 0 {
                                continue;
                            }
                            let mut granted = played.clone();
                            granted[i - 1] = prop - 1;
                            if dd == granted {
                                w2 |= 1 << i;
                            } else if dd == played {
                                d2 |= 1 << i;
                            }
                        }
                        let profile: Vec<crate::game::ActionId> = dd.iter().map(|&x| crate::game::ActionId(x)).collect();
                        let s2 = g.tab(StateId(s), crate::game::ActionId(a0), g.env_index(&profile)).0;
                        Node::A { s: s2, w: w2, d: d2, p: p | self.settled(s2) }
                    })
                    .collect()
            }
        }
    }

    /// Eve's condition in block `(w, d, p)` when `inf` is seen infinitely often.
    fn eve_wins(&self, (w, d, p): (u64, u64, u64), inf: &FixedBitSet) -> bool {
        let wins = |i: usize| match self.objs.get(i) {
            Objective::Reach(_) => Self::has(p, i),
            Objective::Safe(_) => !Self::has(p, i),
            o => o.holds(inf, inf),
        };
        (wins(0) || (1..=self.n).any(|i| Self::has(d, i) && !wins(i))) && (1..=self.n).filter(|&i| Self::has(w, i)).all(wins)
    }
}

/// Statistics of an oracle run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub answer: Answer,
    pub nodes: usize,
    pub blocks: usize,
}

pub fn brute_force_ncrsp(g: &GameStructure, objs: &ObjectiveProfile) -> Result<Answer, OracleError> {
    brute_force_report(g, objs, ORACLE_NODE_LIMIT).map(|r| r.answer)
}

pub fn brute_force_report(g: &GameStructure, objs: &ObjectiveProfile, limit: usize) -> Result<OracleReport, OracleError> {
    let class = objs.class();
    if class == ObjectiveClass::Parity {
        return Err(OracleError::UnsupportedClass(class));
    }
    if !crate::game::validate_game(g).is_ok() {
        return Err(OracleError::InvalidGame);
    }
    let x = Expansion { g, objs, n: g.num_env() };
    let s0 = g.initial().0;
    let root = Node::A { s: s0, w: 0, d: 0, p: x.settled(s0) };
    let mut nodes = vec![root];
    let mut index = HashMap::from([(root, 0usize)]);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut k = 0;
    while k < nodes.len() {
        let mut out = Vec::new();
        for u in x.succ(nodes[k]) {
            let id = *index.entry(u).or_insert_with(|| {
                nodes.push(u);
                nodes.len() - 1
            });
            if !out.contains(&id) {
                out.push(id);
            }
        }
        if nodes.len() > limit {
            return Err(OracleError::TooLarge { nodes: nodes.len(), limit });
        }
        succ.push(out);
        k += 1;
    }

    let mut blocks: HashMap<(u64, u64, u64), Vec<usize>> = HashMap::new();
    for (v, node) in nodes.iter().enumerate() {
        blocks.entry(node.block()).or_default().push(v);
    }
    let mut order: Vec<(u64, u64, u64)> = blocks.keys().copied().collect();
    // Later blocks first: every block change strictly increases this key.
    let rank = |&(w, d, p): &(u64, u64, u64)| (d.count_ones(), w.count_ones(), p.count_ones(), w, d, p);
    order.sort_by_key(|b| std::cmp::Reverse(rank(b)));

    let mut winner: Vec<Option<bool>> = vec![None; nodes.len()];
    for key in &order {
        let members = &blocks[key];
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let (top, bot) = (members.len(), members.len() + 1);
        let mut game = MullerGame {
            eve: members.iter().map(|&v| nodes[v].eve()).chain([true, true]).collect(),
            succ: Vec::with_capacity(members.len() + 2),
            color: members
                .iter()
                .map(|&v| match nodes[v] {
                    Node::A { s, .. } => Some(s),
                    _ => None,
                })
                .chain([Some(g.num_states()), Some(g.num_states() + 1)])
                .collect(),
        };
        for &v in members {
            let out = succ[v]
                .iter()
                .map(|&u| match local.get(&u) {
                    Some(&l) => l,
                    None => {
                        debug_assert!(rank(&nodes[u].block()) > rank(key), "block order is a topological order");
                        if winner[u].expect("later blocks are solved first") {
                            top
                        } else {
                            bot
                        }
                    }
                })
                .collect();
            game.succ.push(out);
        }
        game.succ.push(vec![top]);
        game.succ.push(vec![bot]);
        let ns = g.num_states();
        let cond = |colors: &FixedBitSet| {
            if colors.contains(ns) {
                return true;
            }
            if colors.contains(ns + 1) {
                return false;
            }
            x.eve_wins(*key, colors)
        };
        let mut full = FixedBitSet::with_capacity(game.eve.len());
        full.insert_range(..);
        let eve_region = game.solve(&full, ns + 2, &cond);
        for (k, &v) in members.iter().enumerate() {
            winner[v] = Some(eve_region.contains(k));
        }
    }
    Ok(OracleReport { answer: Answer::from_bool(winner[0].expect("root solved")), nodes: nodes.len(), blocks: order.len() })
}

/// A game with an optional color per node; a play is won by Eve iff `cond`
/// holds on the set of colors seen infinitely often.
struct MullerGame {
    eve: Vec<bool>,
    succ: Vec<Vec<usize>>,
    color: Vec<Option<usize>>,
}

impl MullerGame {
    fn attractor(&self, sub: &FixedBitSet, eve: bool, target: &FixedBitSet) -> FixedBitSet {
        let mut attr = target.clone();
        attr.intersect_with(sub);
        loop {
            let mut grew = false;
            for v in sub.ones() {
                if attr.contains(v) {
                    continue;
                }
                let mut inside = self.succ[v].iter().filter(|&&u| sub.contains(u));
                let joins = if self.eve[v] == eve { inside.any(|&u| attr.contains(u)) } else { inside.all(|&u| attr.contains(u)) };
                if joins {
                    attr.insert(v);
                    grew = true;
                }
            }
            if !grew {
                return attr;
            }
        }
    }

    /// Eve's winning region inside the trap `sub`.
    fn solve(&self, sub: &FixedBitSet, num_colors: usize, cond: &dyn Fn(&FixedBitSet) -> bool) -> FixedBitSet {
        let mut colors = FixedBitSet::with_capacity(num_colors);
        sub.ones().filter_map(|v| self.color[v]).for_each(|c| colors.insert(c));
        if sub.is_clear() {
            return sub.clone();
        }
        let sigma = cond(&colors);
        let members: Vec<usize> = colors.ones().collect();
        // Maximal nonempty subsets of `colors` won by the other player.
        let mut children: Vec<FixedBitSet> = Vec::new();
        for mask in (1u64..(1 << members.len()) - 1).rev() {
            let mut set = FixedBitSet::with_capacity(num_colors);
            members.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).for_each(|(_, &c)| set.insert(c));
            if cond(&set) != sigma && !children.iter().any(|ch| set.is_subset(ch)) {
                children.push(set);
            }
        }
        let mut rest = sub.clone();
        let mut opponent = FixedBitSet::with_capacity(sub.len());
        'outer: loop {
            for child in &children {
                let mut avoid = FixedBitSet::with_capacity(sub.len());
                rest.ones().filter(|&v| self.color[v].is_some_and(|c| !child.contains(c))).for_each(|v| avoid.insert(v));
                let attr = self.attractor(&rest, sigma, &avoid);
                let mut inner = rest.clone();
                inner.difference_with(&attr);
                let eve_inner = self.solve(&inner, num_colors, cond);
                let mut opp_inner = inner.clone();
                if sigma {
                    opp_inner.difference_with(&eve_inner);
                } else {
                    opp_inner = eve_inner;
                }
                if !opp_inner.is_clear() {
                    let b = self.attractor(&rest, !sigma, &opp_inner);
                    rest.difference_with(&b);
                    opponent.union_with(&b);
                    continue 'outer;
                }
            }
            break;
        }
        if sigma {
            rest
        } else {
            opponent
        }
    }
}

/// Eve's winning nodes, decided by trying every positional Eve strategy and
/// looking for a reachable cycle with odd least priority in what remains.
pub fn parity_by_enumeration(game: &ParityGame, limit: u128) -> Result<FixedBitSet, OracleError> {
    let n = game.len();
    let eve: Vec<usize> = (0..n).filter(|&v| game.owner[v] == Player::Eve).collect();
    let count = eve.iter().try_fold(1u128, |acc, &v| acc.checked_mul(game.succ[v].len() as u128)).unwrap_or(u128::MAX);
    if count > limit {
        return Err(OracleError::TooManyStrategies { count, limit });
    }
    let mut won = FixedBitSet::with_capacity(n);
    let mut choice = vec![0usize; eve.len()];
    for _ in 0..count {
        let mut edges: Vec<Vec<usize>> = game.succ.clone();
        for (k, &v) in eve.iter().enumerate() {
            edges[v] = vec![game.succ[v][choice[k]]];
        }
        for v in 0..n {
            if !won.contains(v) && !adam_escapes(game, &edges, v) {
                won.insert(v);
            }
        }
        for (k, &v) in eve.iter().enumerate() {
            choice[k] += 1;
            if choice[k] < game.succ[v].len() {
                break;
            }
            choice[k] = 0;
        }
    }
    Ok(won)
}

fn reachable(edges: &[Vec<usize>], from: usize, allowed: impl Fn(usize) -> bool) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(edges.len());
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &u in &edges[v] {
            if allowed(u) && !seen.contains(u) {
                seen.insert(u);
                stack.push(u);
            }
        }
    }
    seen
}

/// Whether a cycle with odd least priority is reachable from `v`.
fn adam_escapes(game: &ParityGame, edges: &[Vec<usize>], v: usize) -> bool {
    let mut from_v = reachable(edges, v, |_| true);
    from_v.insert(v);
    from_v.ones().any(|u| {
        let p = game.priority[u];
        p % 2 == 1 && reachable(edges, u, |x| game.priority[x] >= p).contains(u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{figure1, figure1_variant, unreachable_target};
    use crate::random::{random_parity_game, rng};
    use crate::solvers::zielonka_solve;
    use crate::synthesis::{ncrsp_solve, SolverChoice};

    #[test]
    fn reference_instances() {
        let (g, objs) = figure1();
        assert_eq!(brute_force_ncrsp(&g, &objs), Ok(Answer::Yes));
        let (g, objs) = unreachable_target();
        assert_eq!(brute_force_ncrsp(&g, &objs), Ok(Answer::No));
    }

    #[test]
    fn variant_is_adjudicated_by_the_oracle() {
        let (g, objs) = figure1_variant();
        let oracle = brute_force_ncrsp(&g, &objs).unwrap();
        assert_eq!(ncrsp_solve(&g, &objs, SolverChoice::Both).unwrap().answer, oracle);
    }

    #[test]
    fn size_guard_refuses() {
        let (g, objs) = figure1();
        assert!(matches!(brute_force_report(&g, &objs, 10), Err(OracleError::TooLarge { limit: 10, .. })));
    }

    #[test]
    fn enumeration_matches_zielonka_on_small_games() {
        let mut r = rng(7);
        for _ in 0..50 {
            let game = random_parity_game(6, 4, 3, &mut r);
            let expected = zielonka_solve(&game).eve_nodes;
            assert_eq!(parity_by_enumeration(&game, 1 << 20).unwrap(), expected);
        }
    }
}
