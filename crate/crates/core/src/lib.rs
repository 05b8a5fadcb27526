//! Non-cooperative rational synthesis for concurrent game structures.
//!
//! Given a concurrent game and one objective per agent, decide whether
//! agent 0 has a strategy under which every 0-fixed Nash equilibrium
//! satisfies agent 0's objective, and extract such a strategy.
//!
//! The pipeline: [`game`] holds the input, [`arena`] builds the turn-based
//! Eve/Adam arena, [`reductions`] compiles it into a parity game per
//! objective class, [`solvers`] decides it, and [`synthesis`] extracts and
//! certifies agent 0's strategy. [`oracle`] re-decides instances
//! independently for differential testing.

pub mod arena;
pub mod examples;
pub mod formula;
pub mod game;
pub mod objective;
pub mod oracle;
pub mod play;
pub mod random;
pub mod reductions;
pub mod solvers;
pub mod synthesis;

pub use arena::{AdamRule, Arena, ArenaState, Layer};
pub use formula::Formula;
pub use game::{validate_game, ActionId, ActionProfile, AgentId, AgentSet, GameBuilder, GameStructure, StateId};
pub use objective::{eval_objective, payoff, Objective, ObjectiveClass, ObjectiveProfile, StateSet};
pub use play::{History, LassoPlay};
pub use reductions::{build_parity_arena, ParityArena};
pub use synthesis::{check_solution, ncrsp_solve, Answer, Sigma0, SolverChoice};
