//! Small built-in instances used by tests, benchmarks and the CLI.

use crate::game::{ActionId, GameBuilder, GameStructure, StateId};
use crate::objective::{state_set, Objective, ObjectiveProfile};

fn names(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// The three-agent reachability game with states `s0 s1 s2 T01 T2`.
///
/// Agent 0 picks `l`/`r`, agents 1 and 2 pick `a`/`b`. Agents 0 and 1 want
/// to reach `T01`, agent 2 wants `T2`.
pub fn figure1() -> (GameStructure, ObjectiveProfile) {
    let [s0, s1, s2, t01, t2] = [0, 1, 2, 3, 4].map(StateId);
    let (l, r, a, b) = (Some(ActionId(0)), Some(ActionId(1)), Some(ActionId(0)), Some(ActionId(1)));
    let mut gb =
        GameBuilder::new(names(&["s0", "s1", "s2", "T01", "T2"]), s0, vec![names(&["l", "r"]), names(&["a", "b"]), names(&["a", "b"])]);
    let rows = [
        (s0, [l, None, None], s2),
        (s0, [r, None, None], s1),
        (s1, [r, a, None], t01),
        (s1, [r, b, None], s2),
        (s1, [l, None, None], s1),
        (s2, [l, None, a], s0),
        (s2, [l, None, b], t2),
        (s2, [r, None, None], s2),
        (t01, [None, None, None], t01),
        (t2, [None, None, None], t2),
    ];
    for (s, pattern, t) in rows {
        gb.set_pattern(s, &pattern, t).expect("well-formed row");
    }
    let g = gb.build();
    let objs = ObjectiveProfile::new(
        &g,
        vec![Objective::Reach(state_set(5, [t01])), Objective::Reach(state_set(5, [t01])), Objective::Reach(state_set(5, [t2]))],
    )
    .expect("homogeneous profile");
    (g, objs)
}

/// [`figure1`] with the edge from `s1` under `(r, a, *)` redirected to a new
/// sink `T1` that only agent 1 wants.
pub fn figure1_variant() -> (GameStructure, ObjectiveProfile) {
    let (g, _) = figure1();
    let mut names = g.state_names().to_vec();
    names.push("T1".to_string());
    let t1 = StateId(5);
    let actions = (0..3).map(|i| g.action_names(i).to_vec()).collect();
    let mut gb = GameBuilder::new(names, g.initial(), actions);
    let (s1, r, a) = (StateId(1), Some(ActionId(1)), Some(ActionId(0)));
    for s in g.states() {
        for p in g.profiles().filter(|p| s != s1 || Some(p.agent0()) != r || Some(p.env()[0]) != a) {
            gb.set(s, &p, g.successor(s, &p).expect("complete")).expect("in range");
        }
    }
    gb.set_pattern(s1, &[r, a, None], t1).expect("well-formed row");
    gb.set_pattern(t1, &[None, None, None], t1).expect("well-formed row");
    let g = gb.build();
    let [t01, t2] = [StateId(3), StateId(4)];
    let objs = ObjectiveProfile::new(
        &g,
        vec![Objective::Reach(state_set(6, [t01])), Objective::Reach(state_set(6, [t01, t1])), Objective::Reach(state_set(6, [t2]))],
    )
    .expect("homogeneous profile");
    (g, objs)
}

/// A one-agent game whose only target is unreachable from the initial state.
pub fn unreachable_target() -> (GameStructure, ObjectiveProfile) {
    let mut gb = GameBuilder::new(names(&["start", "goal"]), StateId(0), vec![names(&["stay"])]);
    gb.set_pattern(StateId(0), &[None], StateId(0)).expect("well-formed row");
    gb.set_pattern(StateId(1), &[None], StateId(1)).expect("well-formed row");
    let g = gb.build();
    let objs = ObjectiveProfile::new(&g, vec![Objective::Reach(state_set(2, [StateId(1)]))]).expect("single agent");
    (g, objs)
}
