//! Seeded random instances for campaigns and property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::game::{ActionId, GameBuilder, GameStructure, StateId};
use crate::objective::{state_set, Objective, ObjectiveClass, ObjectiveError, ObjectiveProfile};
use crate::solvers::{ParityGame, Player};

/// The generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceShape {
    pub states: usize,
    /// Environment agents; the game has `agents + 1` agents.
    pub agents: usize,
    /// Actions per agent.
    pub actions: usize,
    pub class: ObjectiveClass,
    /// Probability that a state belongs to an agent's target set.
    pub density: f64,
}

impl InstanceShape {
    pub fn new(states: usize, agents: usize, actions: usize, class: ObjectiveClass) -> Self {
        InstanceShape { states, agents, actions, class, density: 0.4 }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.states == 0 || self.actions == 0 {
            return Err("at least one state and one action are required".into());
        }
        if self.agents >= 63 {
            return Err("at most 62 environment agents".into());
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err("density must lie in [0, 1]".into());
        }
        if self.class == ObjectiveClass::Parity {
            return Err("parity objectives are generated as Muller formulas".into());
        }
        Ok(())
    }
}

/// State names used by generated instances.
pub fn state_name(k: usize) -> String {
    format!("q{k}")
}

/// A complete deterministic game; every transition is uniform over states.
pub fn random_game(shape: &InstanceShape, rng: &mut impl Rng) -> GameStructure {
    let names = (0..shape.states).map(state_name).collect();
    let actions = (0..=shape.agents).map(|_| (0..shape.actions).map(|a| format!("a{a}")).collect()).collect();
    let mut gb = GameBuilder::new(names, StateId(0), actions);
    let profiles: usize = shape.actions.pow(shape.agents as u32 + 1);
    for s in 0..shape.states {
        for k in 0..profiles {
            let mut rest = k;
            let p: Vec<usize> = (0..=shape.agents)
                .map(|_| {
                    let a = rest % shape.actions;
                    rest /= shape.actions;
                    a
                })
                .collect();
            let succ = StateId(rng.gen_range(0..shape.states));
            gb.set(StateId(s), &crate::game::ActionProfile::from_indices(&p), succ).expect("profile in range");
        }
    }
    gb.build()
}

fn random_set(n: usize, density: f64, rng: &mut impl Rng) -> crate::objective::StateSet {
    state_set(n, (0..n).filter(|_| rng.gen_bool(density)).map(StateId))
}

/// A formula over state atoms of depth at most `depth`.
pub fn random_formula(num_states: usize, depth: usize, rng: &mut impl Rng) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let atom = Formula::atom(StateId(rng.gen_range(0..num_states)));
        return if rng.gen_bool(0.3) { Formula::not(atom) } else { atom };
    }
    let l = random_formula(num_states, depth - 1, rng);
    let r = random_formula(num_states, depth - 1, rng);
    match rng.gen_range(0..5) {
        0 => Formula::not(Formula::and(l, r)),
        1 | 2 => Formula::and(l, r),
        _ => Formula::or(l, r),
    }
}

pub fn random_objective(class: ObjectiveClass, num_states: usize, density: f64, rng: &mut impl Rng) -> Objective {
    match class {
        ObjectiveClass::Reach => Objective::Reach(random_set(num_states, density, rng)),
        ObjectiveClass::Safe => Objective::Safe(random_set(num_states, 1.0 - density, rng)),
        ObjectiveClass::Buchi => Objective::Buchi(random_set(num_states, density, rng)),
        ObjectiveClass::CoBuchi => Objective::CoBuchi(random_set(num_states, density, rng)),
        ObjectiveClass::Parity => Objective::Parity((0..num_states).map(|_| rng.gen_range(0..4)).collect()),
        ObjectiveClass::Muller => Objective::Muller(random_formula(num_states, 2, rng)),
    }
}

pub fn random_instance(shape: &InstanceShape, rng: &mut impl Rng) -> Result<(GameStructure, ObjectiveProfile), ObjectiveError> {
    let g = random_game(shape, rng);
    let objs = (0..=shape.agents).map(|_| random_objective(shape.class, shape.states, shape.density, rng)).collect();
    let objs = ObjectiveProfile::new(&g, objs)?;
    Ok((g, objs))
}

/// The instance of a campaign seed: shape parameters are drawn within the
/// given maxima, then the instance itself.
pub fn campaign_instance(
    seed: u64,
    class: ObjectiveClass,
    max_states: usize,
    max_agents: usize,
    max_actions: usize,
) -> (GameStructure, ObjectiveProfile) {
    let mut r = rng(seed);
    let shape = InstanceShape {
        states: r.gen_range(1..=max_states),
        agents: r.gen_range(0..=max_agents),
        actions: r.gen_range(1..=max_actions),
        class,
        density: [0.25, 0.4, 0.6][r.gen_range(0..3)],
    };
    random_instance(&shape, &mut r).expect("generated profiles are well-formed")
}

/// A parity game in which every node has between 1 and `max_out` successors.
pub fn random_parity_game(nodes: usize, priorities: u32, max_out: usize, rng: &mut impl Rng) -> ParityGame {
    let mut all: Vec<usize> = (0..nodes).collect();
    let succ = (0..nodes)
        .map(|_| {
            all.shuffle(rng);
            let k = rng.gen_range(1..=max_out.min(nodes));
            let mut out = all[..k].to_vec();
            out.sort_unstable();
            out
        })
        .collect();
    ParityGame {
        owner: (0..nodes).map(|_| if rng.gen_bool(0.5) { Player::Eve } else { Player::Adam }).collect(),
        priority: (0..nodes).map(|_| rng.gen_range(0..priorities)).collect(),
        succ,
        initial: 0,
    }
}

/// A uniformly chosen action for every agent.
pub fn random_profile(g: &GameStructure, rng: &mut impl Rng) -> Vec<ActionId> {
    (0..g.num_agents()).map(|i| ActionId(rng.gen_range(0..g.num_actions(i)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;

    #[test]
    fn instances_are_valid_and_reproducible() {
        for class in ObjectiveClass::SOLVABLE {
            for seed in 0..20 {
                let (g, objs) = campaign_instance(seed, class, 4, 2, 2);
                assert!(validate_game(&g).is_ok());
                assert_eq!(objs.class(), class);
                let (g2, objs2) = campaign_instance(seed, class, 4, 2, 2);
                assert_eq!(g, g2);
                assert_eq!(objs.objectives(), objs2.objectives());
            }
        }
    }

    #[test]
    fn shape_checks() {
        assert!(InstanceShape::new(0, 1, 2, ObjectiveClass::Reach).check().is_err());
        assert!(InstanceShape::new(3, 1, 2, ObjectiveClass::Reach).check().is_ok());
        let mut bad = InstanceShape::new(3, 1, 2, ObjectiveClass::Reach);
        bad.density = 1.5;
        assert!(bad.check().is_err());
    }
}
