//! The machine-readable result of a run and the strategy file format.

use serde::{Deserialize, Serialize};

use ratsynth_core::game::{ActionId, GameStructure};
use ratsynth_core::synthesis::{MemoryNode, SolveStats};
use ratsynth_core::{Answer, Sigma0};

/// Agent 0's strategy as a memory machine, by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDocument {
    pub initial: usize,
    pub nodes: Vec<NodeDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub state: String,
    pub action: String,
    #[serde(default)]
    pub label: String,
    /// Memory update on each environment profile.
    pub next: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Actions of agents `1..=n`.
    pub env: Vec<String>,
    pub to: usize,
}

impl StrategyDocument {
    pub fn from_sigma(g: &GameStructure, sigma: &Sigma0) -> Self {
        let nodes = sigma
            .nodes
            .iter()
            .zip(&sigma.next)
            .map(|(n, next)| NodeDocument {
                state: g.state_name(n.state).to_string(),
                action: g.action_name(0, n.action).to_string(),
                label: n.label.clone(),
                next: next
                    .iter()
                    .enumerate()
                    .map(|(e, &to)| Edge {
                        env: g.env_profile(e).iter().enumerate().map(|(k, &a)| g.action_name(k + 1, a).to_string()).collect(),
                        to,
                    })
                    .collect(),
            })
            .collect();
        StrategyDocument { initial: sigma.initial, nodes }
    }

    /// Resolves names against `g` and checks the machine follows its table.
    pub fn to_sigma(&self, g: &GameStructure) -> Result<Sigma0, String> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut next = Vec::with_capacity(self.nodes.len());
        for (m, n) in self.nodes.iter().enumerate() {
            let state = g.state_by_name(&n.state).ok_or_else(|| format!("node {m}: unknown state `{}`", n.state))?;
            let action = g.action_by_name(0, &n.action).ok_or_else(|| format!("node {m}: unknown action `{}`", n.action))?;
            let mut row = vec![None; g.num_env_profiles()];
            for edge in &n.next {
                if edge.env.len() != g.num_env() {
                    return Err(format!("node {m}: environment profile of length {}", edge.env.len()));
                }
                let env = edge
                    .env
                    .iter()
                    .enumerate()
                    .map(|(k, a)| g.action_by_name(k + 1, a).ok_or_else(|| format!("node {m}: agent {} has no action `{a}`", k + 1)))
                    .collect::<Result<Vec<ActionId>, _>>()?;
                let slot = &mut row[g.env_index(&env)];
                if slot.replace(edge.to).is_some() {
                    return Err(format!("node {m}: profile ({}) listed twice", edge.env.join(",")));
                }
            }
            let row = row
                .into_iter()
                .enumerate()
                .map(|(e, t)| t.ok_or_else(|| format!("node {m}: no update for {}", g.env_to_string(&g.env_profile(e)))))
                .collect::<Result<Vec<_>, _>>()?;
            nodes.push(MemoryNode { state, action, label: n.label.clone() });
            next.push(row);
        }
        let sigma = Sigma0 { nodes, initial: self.initial, next };
        sigma.validate(g).map_err(|e| e.to_string())?;
        Ok(sigma)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub answer: String,
    pub nodes: usize,
    pub blocks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub solver: String,
    pub class: String,
    pub arena_nodes: usize,
    pub a_nodes: usize,
    pub edges: usize,
    pub max_priority: u32,
    pub uncovered: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_branch: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    /// Excluded from determinism comparisons.
    pub wall_ms: f64,
}

impl StatsDocument {
    pub fn new(solver: &str, class: &str, stats: &SolveStats) -> Self {
        StatsDocument {
            solver: solver.to_string(),
            class: class.to_string(),
            arena_nodes: stats.arena_nodes,
            a_nodes: stats.a_nodes,
            edges: stats.edges,
            max_priority: stats.max_priority,
            uncovered: stats.uncovered,
            finite_branch: stats.finite_branch,
            finite_bound: stats.finite_bound,
            oracle: None,
            wall_ms: stats.elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// One document per `solve` run. The witness is present iff the answer is YES.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<StrategyDocument>,
    pub stats: StatsDocument,
}

impl ResultDocument {
    pub fn new(answer: Answer, witness: Option<StrategyDocument>, stats: StatsDocument) -> Self {
        debug_assert_eq!(answer == Answer::Yes, witness.is_some());
        ResultDocument { answer: answer.to_string(), witness, stats }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}
