//! Two-player parity games and their solvers.
//!
//! Convention throughout: a play is won by Eve iff the least priority seen
//! infinitely often is even.

mod finite;
mod zielonka;

pub use finite::{finite_duration_bound, solve_finite_duration, solve_finite_duration_report, FiniteDurationReport, SolverError};
pub use zielonka::{attractor, zielonka_solve, WinRegion};

use fixedbitset::FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }

    /// The player favoured by a priority.
    pub fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Eve
        } else {
            Player::Adam
        }
    }

    fn index(self) -> usize {
        match self {
            Player::Eve => 0,
            Player::Adam => 1,
        }
    }
}

/// An explicit parity game; every node has at least one successor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
}

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, out) in self.succ.iter().enumerate() {
            for &u in out {
                pred[u].push(v);
            }
        }
        pred
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Checks that every node has a successor and edges stay in range.
    pub fn is_well_formed(&self) -> bool {
        self.priority.len() == self.len()
            && self.succ.len() == self.len()
            && self.succ.iter().all(|s| !s.is_empty() && s.iter().all(|&u| u < self.len()))
            && (self.is_empty() || self.initial < self.len())
    }
}

/// Whether the positional Eve strategy `choice` wins every play from `from`:
/// no cycle with odd least priority is reachable once Eve's nodes keep only
/// their chosen successor.
pub fn strategy_wins(game: &ParityGame, choice: &[Option<usize>], from: usize) -> bool {
    let out = |v: usize| -> &[usize] {
        match (game.owner[v], &choice[v]) {
            (Player::Eve, Some(u)) => std::slice::from_ref(u),
            _ => &game.succ[v],
        }
    };
    let mut reach = FixedBitSet::with_capacity(game.len());
    reach.insert(from);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &u in out(v) {
            if !reach.contains(u) {
                reach.insert(u);
                stack.push(u);
            }
        }
    }
    let mut odd: Vec<u32> = reach.ones().map(|v| game.priority[v]).filter(|p| p % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    odd.into_iter().all(|p| {
        // A cycle through priority p among nodes of priority >= p.
        let keep = |v: usize| reach.contains(v) && game.priority[v] >= p;
        let mut graph = petgraph::graph::DiGraph::<usize, ()>::new();
        let mut ids = vec![None; game.len()];
        for v in reach.ones().filter(|&v| keep(v)) {
            ids[v] = Some(graph.add_node(v));
        }
        for v in reach.ones().filter(|&v| keep(v)) {
            for &u in out(v) {
                if let (Some(a), Some(b)) = (ids[v], ids[u]) {
                    graph.add_edge(a, b, ());
                }
            }
        }
        petgraph::algo::tarjan_scc(&graph).into_iter().all(|comp| {
            let cyclic = comp.len() > 1 || graph.contains_edge(comp[0], comp[0]);
            !cyclic || comp.iter().all(|&x| game.priority[graph[x]] != p)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_check_sees_odd_cycles() {
        // Eve at 0 picks the even self-loop or the odd node 1 that loops back.
        let g = ParityGame { owner: vec![Player::Eve, Player::Adam], priority: vec![2, 1], succ: vec![vec![0, 1], vec![0]], initial: 0 };
        assert!(strategy_wins(&g, &[Some(0), None], 0));
        assert!(!strategy_wins(&g, &[Some(1), None], 0));
        assert!(!strategy_wins(&g, &[Some(1), None], 1));
    }
}
