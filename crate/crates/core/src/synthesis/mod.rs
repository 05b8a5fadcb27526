//! Deciding the synthesis problem and extracting agent 0's strategy.

mod check;
mod strategy;

pub use check::{check_solution, deviator, root, CheckReport, Checker, Counterexample};
pub use strategy::{
    derive_sigma0, lift_history, lift_round, project_history, ArenaHistory, EveStrategy, MemoryNode, Sigma0, StrategyError,
};

use std::fmt;
use std::time::{Duration, Instant};

use log::info;
use thiserror::Error;

use crate::arena::{Arena, Layer};
use crate::game::{ActionId, GameStructure};
use crate::objective::ObjectiveProfile;
use crate::reductions::{build_parity_arena_with, ParityArena, ReductionError, DEFAULT_NODE_LIMIT};
use crate::solvers::{solve_finite_duration_report, zielonka_solve, SolverError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub fn from_bool(yes: bool) -> Self {
        if yes {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Zielonka on the parity arena.
    Parity,
    /// Finite-duration search; polynomial classes only.
    Finite,
    /// Both, which must agree.
    Both,
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("parity solver says {parity}, finite-duration search says {finite}")]
    Disagreement { parity: Answer, finite: Answer },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub arena_nodes: usize,
    pub a_nodes: usize,
    pub edges: usize,
    pub max_priority: u32,
    pub uncovered: usize,
    pub finite_branch: Option<usize>,
    pub finite_bound: Option<usize>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct NcrspOutcome {
    pub answer: Answer,
    /// Present on YES when the parity solver ran.
    pub witness: Option<Sigma0>,
    pub stats: SolveStats,
}

/// Candidate switches tried when simplifying Eve's strategy.
pub const SIMPLIFY_BUDGET: usize = 256;

pub fn ncrsp_solve(g: &GameStructure, objs: &ObjectiveProfile, choice: SolverChoice) -> Result<NcrspOutcome, SynthesisError> {
    ncrsp_solve_with(g, objs, choice, DEFAULT_NODE_LIMIT)
}

/// As [`ncrsp_solve`], refusing arenas with more than `limit` nodes.
pub fn ncrsp_solve_with(
    g: &GameStructure,
    objs: &ObjectiveProfile,
    choice: SolverChoice,
    limit: usize,
) -> Result<NcrspOutcome, SynthesisError> {
    let start = Instant::now();
    let arena = Arena::new(g);
    let pa = build_parity_arena_with(arena, objs, limit)?;
    let mut stats = arena_stats(&pa);
    let mut finite = None;
    if choice != SolverChoice::Parity {
        let report = solve_finite_duration_report(&pa, usize::MAX)?;
        stats.finite_branch = Some(report.longest_branch);
        stats.finite_bound = Some(report.bound);
        finite = Some(Answer::from_bool(report.eve_wins));
    }
    let mut parity = None;
    let mut witness = None;
    if choice != SolverChoice::Finite {
        let region = zielonka_solve(&pa.game);
        let wins = region.eve_nodes.contains(pa.initial());
        parity = Some(Answer::from_bool(wins));
        if wins {
            let mut sigma = EveStrategy::from_region(&pa, &region);
            sigma.simplify(&pa, SIMPLIFY_BUDGET);
            witness = Some(derive_sigma0(&arena, &pa, &sigma, true)?);
        }
    }
    let answer = match (parity, finite) {
        (Some(p), Some(f)) if p != f => return Err(SynthesisError::Disagreement { parity: p, finite: f }),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => unreachable!("at least one solver runs"),
    };
    stats.elapsed = start.elapsed();
    info!("{answer}: {} arena nodes in {:?}", stats.arena_nodes, stats.elapsed);
    Ok(NcrspOutcome { answer, witness, stats })
}

fn arena_stats(pa: &ParityArena) -> SolveStats {
    SolveStats {
        arena_nodes: pa.len(),
        a_nodes: pa.count_layer(Layer::A),
        edges: pa.game.succ.iter().map(Vec::len).sum(),
        max_priority: pa.game.priority.iter().copied().max().unwrap_or(0),
        uncovered: pa.uncovered,
        ..SolveStats::default()
    }
}

/// Every memoryless strategy of agent 0, as action vectors indexed by state.
/// Returns `None` when there are more than `limit` of them.
pub fn memoryless_strategies(g: &GameStructure, limit: usize) -> Option<Vec<Vec<ActionId>>> {
    let k = g.num_actions(0);
    let total = (0..g.num_states()).try_fold(1usize, |acc, _| acc.checked_mul(k).filter(|&t| t <= limit))?;
    Some(
        (0..total)
            .map(|mut idx| {
                (0..g.num_states())
                    .map(|_| {
                        let a = ActionId(idx % k);
                        idx /= k;
                        a
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Searches the memoryless strategies of agent 0 for a certified solution.
/// `None` means the search space exceeds `limit`.
pub fn find_memoryless_solution(g: &GameStructure, objs: &ObjectiveProfile, limit: usize) -> Option<Option<Sigma0>> {
    let all = memoryless_strategies(g, limit)?;
    Some(all.into_iter().map(|a| Sigma0::memoryless(g, &a)).find(|s| check_solution(g, objs, s).map(|r| r.valid).unwrap_or(false)))
}

/// The witness to report for a YES instance: the first memoryless strategy
/// that certifies, searching at most `limit` candidates, else `derived`.
pub fn compact_witness(g: &GameStructure, objs: &ObjectiveProfile, derived: &Sigma0, limit: usize) -> Sigma0 {
    match find_memoryless_solution(g, objs, limit) {
        Some(Some(sigma)) => sigma,
        _ => derived.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{figure1, unreachable_target};
    use crate::game::ActionProfile;
    use crate::play::History;

    #[test]
    fn figure1_is_yes_with_certified_witness() {
        let (g, objs) = figure1();
        let out = ncrsp_solve(&g, &objs, SolverChoice::Both).unwrap();
        assert_eq!(out.answer, Answer::Yes);
        let derived = out.witness.unwrap();
        assert!(check_solution(&g, &objs, &derived).unwrap().valid);
        let h = History::new(g.initial());
        assert_eq!(g.action_name(0, derived.decide(&g, &h).unwrap()), "r");
        // The compact witness plays r at s0 and at s1.
        let sigma = compact_witness(&g, &objs, &derived, 1 << 10);
        assert!(check_solution(&g, &objs, &sigma).unwrap().valid);
        assert_eq!(g.action_name(0, sigma.decide(&g, &h).unwrap()), "r");
        let mut h = h;
        h.extend(&g, ActionProfile::from_indices(&[1, 0, 1])).unwrap();
        assert_eq!(g.state_name(h.last()), "s1");
        assert_eq!(g.action_name(0, sigma.decide(&g, &h).unwrap()), "r");
    }

    #[test]
    fn unreachable_target_is_no() {
        let (g, objs) = unreachable_target();
        let out = ncrsp_solve(&g, &objs, SolverChoice::Both).unwrap();
        assert_eq!(out.answer, Answer::No);
        assert!(out.witness.is_none());
        assert_eq!(find_memoryless_solution(&g, &objs, 1 << 10), Some(None));
    }

    #[test]
    fn memoryless_enumeration_respects_limit() {
        let (g, _) = figure1();
        assert_eq!(memoryless_strategies(&g, 32).unwrap().len(), 32);
        assert!(memoryless_strategies(&g, 31).is_none());
    }
}
