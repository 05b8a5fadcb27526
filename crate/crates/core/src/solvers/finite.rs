//! AND-OR search of the finite-duration game: plays stop at the first
//! repeated A-node and Eve wins iff the least priority on the closed loop is
//! even.
//!
//! The search memoizes on (node, summary of the open loop candidates). Only
//! A-nodes with the current `(W, D[, P])` can close a loop later, since those
//! sets never return to an earlier value along a play; the summary maps each
//! such A-node on the path to the least priority seen since it. This keeps
//! the search exact while sharing subtrees across paths.

use std::collections::HashMap;

use thiserror::Error;

use crate::arena::Layer;
use crate::objective::ObjectiveClass;
use crate::reductions::{Annotation, ParityArena};

use super::Player;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("finite-duration search does not apply to class {0}")]
    UnsupportedClass(ObjectiveClass),
    #[error("search branch of {length} nodes exceeds the bound {bound}")]
    BoundExceeded { length: usize, bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDurationReport {
    pub eve_wins: bool,
    /// Longest branch seen, in nodes of all layers.
    pub longest_branch: usize,
    pub bound: usize,
    pub memo_entries: usize,
}

/// `4r + 1` with `r = 1 + (2|Agt|+1)(|Agt|+1)^2 |S|`, times the number of
/// counter configurations for Büchi.
pub fn finite_duration_bound(class: ObjectiveClass, num_agents: usize, num_states: usize) -> usize {
    let agt = num_agents;
    let factor = match class {
        ObjectiveClass::Buchi => 2 * agt * agt,
        _ => 1,
    };
    let r = 1 + (2 * agt + 1) * (agt + 1) * (agt + 1) * num_states * factor;
    4 * r + 1
}

pub fn solve_finite_duration(arena: &ParityArena) -> Result<bool, SolverError> {
    solve_finite_duration_report(arena, usize::MAX).map(|r| r.eve_wins)
}

struct Frame {
    node: usize,
    next_child: usize,
    /// Set once the node's value is known.
    value: Option<bool>,
    memo_key: MemoKey,
}

type MemoKey = (usize, Vec<(usize, u32)>);

/// Runs the search; `bound` overrides the computed branch bound when smaller.
pub fn solve_finite_duration_report(arena: &ParityArena, bound: usize) -> Result<FiniteDurationReport, SolverError> {
    if !arena.class.is_polynomial() {
        return Err(SolverError::UnsupportedClass(arena.class));
    }
    let g = &arena.game;
    let bound = bound.min(finite_duration_bound(arena.class, arena.num_agents, arena.num_states));
    let is_a: Vec<bool> = arena.nodes.iter().map(|q| q.base.layer() == Layer::A).collect();
    let mut blocks = HashMap::new();
    let block: Vec<usize> = arena
        .nodes
        .iter()
        .map(|q| {
            let p = match q.extra {
                Annotation::ReachSafe { p } => p.0,
                _ => 0,
            };
            let next = blocks.len();
            *blocks.entry((q.base.w, q.base.d, p)).or_insert(next)
        })
        .collect();

    let mut on_path: Vec<usize> = vec![usize::MAX; g.len()];
    let mut memo: HashMap<MemoKey, bool> = HashMap::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut longest = 0;

    let summary = |stack: &[Frame], node: usize| -> Vec<(usize, u32)> {
        let mut low = g.priority[node];
        let mut out = Vec::new();
        if is_a[node] {
            out.push((node, low));
        }
        for f in stack.iter().rev() {
            if block[f.node] != block[node] {
                break;
            }
            low = low.min(g.priority[f.node]);
            if is_a[f.node] {
                out.push((f.node, low));
            }
        }
        out.sort_unstable();
        out
    };

    let root = g.initial;
    let key = (root, summary(&stack, root));
    on_path[root] = 0;
    stack.push(Frame { node: root, next_child: 0, value: None, memo_key: key });
    let result = loop {
        let top = stack.len() - 1;
        longest = longest.max(stack.len());
        if stack.len() > bound {
            return Err(SolverError::BoundExceeded { length: stack.len(), bound });
        }
        let v = stack[top].node;
        let eve = g.owner[v] == Player::Eve;
        let done = match stack[top].value {
            Some(x) => Some(x),
            None if stack[top].next_child == g.succ[v].len() => Some(!eve),
            None => None,
        };
        if let Some(value) = done {
            let f = stack.pop().expect("nonempty");
            on_path[f.node] = usize::MAX;
            memo.insert(f.memo_key, value);
            match stack.last_mut() {
                None => break value,
                Some(parent) => {
                    if value == (g.owner[parent.node] == Player::Eve) {
                        parent.value = Some(value);
                    }
                    continue;
                }
            }
        }
        let u = g.succ[v][stack[top].next_child];
        stack[top].next_child += 1;
        let leaf = if is_a[u] && on_path[u] != usize::MAX {
            let low = stack[on_path[u]..].iter().map(|f| g.priority[f.node]).min().expect("loop is nonempty");
            Some(low % 2 == 0)
        } else {
            None
        };
        let key = match leaf {
            Some(_) => None,
            None => Some((u, summary(&stack, u))),
        };
        let value = leaf.or_else(|| key.as_ref().and_then(|k| memo.get(k).copied()));
        match value {
            Some(x) => {
                if x == eve {
                    stack[top].value = Some(x);
                }
            }
            None => {
                if is_a[u] {
                    on_path[u] = stack.len();
                }
                stack.push(Frame { node: u, next_child: 0, value: None, memo_key: key.expect("not a leaf") });
            }
        }
    };
    Ok(FiniteDurationReport { eve_wins: result, longest_branch: longest, bound, memo_entries: memo.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        // |Agt| = 3, |S| = 5: r = 1 + 7 * 16 * 5 = 561.
        assert_eq!(finite_duration_bound(ObjectiveClass::Reach, 3, 5), 4 * 561 + 1);
        assert_eq!(finite_duration_bound(ObjectiveClass::Buchi, 1, 1), 4 * (1 + 3 * 4 * 2) + 1);
    }
}
