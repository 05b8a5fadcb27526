//! Recursive attractor-based parity solving.

use fixedbitset::FixedBitSet;
use log::trace;

use super::{ParityGame, Player};

/// Winning regions and positional winning strategies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinRegion {
    pub eve_nodes: FixedBitSet,
    pub adam_nodes: FixedBitSet,
    /// Defined exactly on Eve-owned nodes of `eve_nodes`.
    pub eve_strategy: Vec<Option<usize>>,
    /// Defined exactly on Adam-owned nodes of `adam_nodes`.
    pub adam_strategy: Vec<Option<usize>>,
}

impl WinRegion {
    pub fn winner(&self, v: usize) -> Player {
        if self.eve_nodes.contains(v) {
            Player::Eve
        } else {
            Player::Adam
        }
    }
}

struct Solver<'a> {
    game: &'a ParityGame,
    pred: Vec<Vec<usize>>,
    strategy: Vec<Option<usize>>,
}

impl Solver<'_> {
    /// Attractor of `player` to `target` inside `sub`; records attracting
    /// moves for `player`'s nodes outside `target`.
    fn attract(&mut self, sub: &FixedBitSet, player: Player, target: &FixedBitSet) -> FixedBitSet {
        let g = self.game;
        let mut attr = target.clone();
        let mut missing: Vec<usize> = vec![0; g.len()];
        let mut stack: Vec<usize> = target.ones().collect();
        while let Some(u) = stack.pop() {
            for &v in &self.pred[u] {
                if !sub.contains(v) || attr.contains(v) {
                    continue;
                }
                let joins = if g.owner[v] == player {
                    self.strategy[v] = Some(u);
                    true
                } else {
                    if missing[v] == 0 {
                        missing[v] = g.succ[v].iter().filter(|&&w| sub.contains(w)).count();
                    }
                    missing[v] -= 1;
                    missing[v] == 0
                };
                if joins {
                    attr.insert(v);
                    stack.push(v);
                }
            }
        }
        attr
    }

    /// Winning regions of the subgame induced by `sub`, indexed by player.
    fn solve(&mut self, sub: &FixedBitSet) -> [FixedBitSet; 2] {
        let g = self.game;
        let empty = FixedBitSet::with_capacity(g.len());
        let Some(p) = sub.ones().map(|v| g.priority[v]).min() else {
            return [empty.clone(), empty];
        };
        let alpha = Player::of_priority(p);
        let mut top = empty.clone();
        sub.ones().filter(|&v| g.priority[v] == p).for_each(|v| top.insert(v));
        let a = self.attract(sub, alpha, &top);
        for v in top.ones() {
            if g.owner[v] == alpha {
                self.strategy[v] = g.succ[v].iter().copied().find(|&u| sub.contains(u));
            }
        }
        let mut rest = sub.clone();
        rest.difference_with(&a);
        let w = self.solve(&rest);
        let beta = alpha.opponent();
        if w[beta.index()].is_clear() {
            let mut out = [empty.clone(), empty];
            out[alpha.index()] = sub.clone();
            return out;
        }
        let b = self.attract(sub, beta, &w[beta.index()]);
        let mut rest = sub.clone();
        rest.difference_with(&b);
        let mut out = self.solve(&rest);
        out[beta.index()].union_with(&b);
        trace!("zielonka: priority {p}, {} nodes, beta dominion {}", sub.count_ones(..), b.count_ones(..));
        out
    }
}

/// Solves `game` exactly; both regions partition the nodes.
pub fn zielonka_solve(game: &ParityGame) -> WinRegion {
    let mut solver = Solver { game, pred: game.predecessors(), strategy: vec![None; game.len()] };
    let [eve, adam] = solver.solve(&game.full_set());
    let pick = |region: &FixedBitSet, who: Player| {
        (0..game.len())
            .map(|v| (region.contains(v) && game.owner[v] == who).then(|| solver.strategy[v].expect("owned winning node has a move")))
            .collect::<Vec<_>>()
    };
    let eve_strategy = pick(&eve, Player::Eve);
    let adam_strategy = pick(&adam, Player::Adam);
    WinRegion { eve_nodes: eve, adam_nodes: adam, eve_strategy, adam_strategy }
}

/// Nodes from which `player` can force a visit to `targets`.
pub fn attractor(game: &ParityGame, player: Player, targets: &FixedBitSet) -> FixedBitSet {
    let mut solver = Solver { game, pred: game.predecessors(), strategy: vec![None; game.len()] };
    solver.attract(&game.full_set(), player, targets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(owner: &[Player], priority: &[u32], succ: &[&[usize]]) -> ParityGame {
        ParityGame { owner: owner.to_vec(), priority: priority.to_vec(), succ: succ.iter().map(|s| s.to_vec()).collect(), initial: 0 }
    }

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        items.iter().for_each(|&i| s.insert(i));
        s
    }

    #[test]
    fn single_nodes() {
        let w = zielonka_solve(&game(&[Player::Eve], &[0], &[&[0]]));
        assert!(w.eve_nodes.contains(0));
        assert_eq!(w.eve_strategy, vec![Some(0)]);
        let w = zielonka_solve(&game(&[Player::Adam], &[1], &[&[0]]));
        assert!(w.adam_nodes.contains(0));
    }

    #[test]
    fn attractor_cases() {
        let chain = game(&[Player::Eve; 3], &[1, 1, 1], &[&[1], &[2], &[2]]);
        assert_eq!(attractor(&chain, Player::Eve, &set(3, &[])), set(3, &[]));
        assert_eq!(attractor(&chain, Player::Eve, &set(3, &[0, 1, 2])), set(3, &[0, 1, 2]));
        assert_eq!(attractor(&chain, Player::Eve, &set(3, &[2])), set(3, &[0, 1, 2]));
        // Adam at 0 can escape to 3.
        let g = game(&[Player::Adam, Player::Eve, Player::Eve, Player::Eve], &[1; 4], &[&[1, 3], &[2], &[2], &[3]]);
        assert_eq!(attractor(&g, Player::Eve, &set(4, &[2])), set(4, &[1, 2]));
        assert_eq!(attractor(&g, Player::Adam, &set(4, &[3])), set(4, &[0, 3]));
    }

    #[test]
    fn nested_priorities() {
        // Eve at 0 chooses between a 1-loop and reaching the 2-loop at 1.
        let g = game(&[Player::Eve, Player::Adam, Player::Adam], &[1, 2, 3], &[&[0, 1], &[1, 2], &[2]]);
        let w = zielonka_solve(&g);
        // Adam at 1 escapes to the 3-sink.
        assert_eq!(w.adam_nodes, set(3, &[0, 1, 2]));
        let g = game(&[Player::Eve, Player::Eve, Player::Adam], &[1, 2, 3], &[&[0, 1], &[1, 2], &[2]]);
        let w = zielonka_solve(&g);
        assert_eq!(w.eve_nodes, set(3, &[0, 1]));
        assert_eq!(w.eve_strategy[0], Some(1));
        assert_eq!(w.eve_strategy[1], Some(1));
    }
}
