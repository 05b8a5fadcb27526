use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ratsynth::{parse_instance, ResultDocument, StrategyDocument};
use ratsynth_core::check_solution;

mod dot_grammar;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ratsynth"))
}

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_figure1_with_oracle() {
    let o = run(&["solve", path_str(&instance("figure1.game")), "--oracle"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("YES\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("oracle agrees: YES"));
}

#[test]
fn solve_exit_codes() {
    let fig = instance("figure1.game");
    for solver in ["both", "finite", "parity"] {
        assert_eq!(code(&run(&["solve", path_str(&fig), "--solver", solver])), 0);
    }
    assert_eq!(code(&run(&["solve", path_str(&instance("unreal.game"))])), 1);
    assert_eq!(code(&run(&["solve", "/nonexistent/file.game"])), 2);
}

#[test]
fn finite_solver_on_muller_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.game");
    let text = std::fs::read_to_string(instance("figure1.game"))
        .unwrap()
        .replace("objective reach", "objective muller")
        .replace("target 0 T01", "formula 0 T01")
        .replace("target 1 T01", "formula 1 T01")
        .replace("target 2 T2", "formula 2 T2");
    std::fs::write(&path, text).unwrap();
    assert_eq!(code(&run(&["solve", path_str(&path), "--solver", "finite"])), 2);
    assert_eq!(code(&run(&["solve", path_str(&path), "--solver", "parity"])), 0);
}

#[test]
fn emitted_strategy_round_trips_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let fig = instance("figure1.game");
    for witness in ["compact", "derived"] {
        let strat = dir.path().join(format!("{witness}.json"));
        let o = run(&["solve", path_str(&fig), "--witness", witness, "--emit-strategy", path_str(&strat)]);
        assert_eq!(code(&o), 0);
        let inst = parse_instance(&fig).unwrap();
        let doc: StrategyDocument = serde_json::from_str(&std::fs::read_to_string(&strat).unwrap()).unwrap();
        let sigma = doc.to_sigma(&inst.game).unwrap();
        assert!(check_solution(&inst.game, &inst.objectives, &sigma).unwrap().valid);
        let o = run(&["check", path_str(&fig), path_str(&strat)]);
        assert_eq!((code(&o), String::from_utf8_lossy(&o.stdout).trim()), (0, "valid"));
    }
}

#[test]
fn check_rejects_a_losing_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let fig = instance("figure1.game");
    let inst = parse_instance(&fig).unwrap();
    // Playing l everywhere loops through s0 and s2 while agent 2 plays a.
    let all_l = ratsynth_core::Sigma0::memoryless(&inst.game, &[ratsynth_core::ActionId(0); 5]);
    let strat = dir.path().join("s.json");
    std::fs::write(&strat, serde_json::to_string(&StrategyDocument::from_sigma(&inst.game, &all_l)).unwrap()).unwrap();
    let o = run(&["check", path_str(&fig), path_str(&strat)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("invalid"));
}

#[test]
fn result_document_is_deterministic_modulo_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let fig = instance("figure1.game");
    let docs: Vec<ResultDocument> = (0..2)
        .map(|k| {
            let p = dir.path().join(format!("r{k}.json"));
            assert_eq!(code(&run(&["solve", path_str(&fig), "--oracle", "--json", path_str(&p)])), 0);
            let mut d: ResultDocument = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
            d.stats.wall_ms = 0.0;
            d
        })
        .collect();
    assert_eq!(docs[0], docs[1]);
    assert_eq!(docs[0].answer, "YES");
    assert!(docs[0].witness.is_some());
    assert_eq!(docs[0].stats.oracle.as_ref().unwrap().answer, "YES");

    let p = dir.path().join("no.json");
    assert_eq!(code(&run(&["solve", path_str(&instance("unreal.game")), "--json", path_str(&p)])), 1);
    let no: ResultDocument = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(no.answer, "NO");
    assert!(no.witness.is_none());
}

#[test]
fn gen_is_byte_deterministic() {
    let args = ["gen", "--states", "3", "--agents", "2", "--actions", "2", "--class", "reach", "--seed", "1"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["gen", "--states", "3", "--agents", "2", "--actions", "2", "--class", "reach", "--seed", "2"]);
    assert_ne!(a.stdout, other.stdout);
    // The generated file loads and validates.
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.game");
    std::fs::write(&p, &a.stdout).unwrap();
    assert_eq!(code(&run(&["validate", "--strict", path_str(&p)])), 0);
    let inst = parse_instance(&p).unwrap();
    assert_eq!((inst.game.num_states(), inst.game.num_agents()), (3, 3));
}

#[test]
fn gen_json_matches_text() {
    let dir = tempfile::tempdir().unwrap();
    for class in ["reach", "safe", "buchi", "cobuchi", "muller"] {
        let base = ["gen", "--states", "4", "--agents", "1", "--actions", "2", "--class", class, "--seed", "9"];
        let text = dir.path().join(format!("{class}.game"));
        let json = dir.path().join(format!("{class}.json"));
        assert_eq!(code(&run(&[&base[..], &["-o", path_str(&text)]].concat())), 0);
        assert_eq!(code(&run(&[&base[..], &["--json", "-o", path_str(&json)]].concat())), 0);
        let (a, b) = (parse_instance(&text).unwrap(), parse_instance(&json).unwrap());
        assert_eq!(a.game, b.game);
        assert_eq!(a.objectives.objectives(), b.objectives.objectives());
    }
}

#[test]
fn gen_rejects_infeasible_shapes() {
    for args in [
        &["gen", "--states", "0", "--agents", "1", "--actions", "2"][..],
        &["gen", "--states", "3", "--agents", "1", "--actions", "0"],
        &["gen", "--states", "3", "--agents", "40", "--actions", "2"],
        &["gen", "--states", "3", "--agents", "1", "--actions", "2", "--class", "parity"],
        &["gen", "--states", "3", "--agents", "1", "--actions", "2", "--density", "2"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn validate_reports_every_defect() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.game");
    let text = std::fs::read_to_string(instance("figure1.game")).unwrap().replace("s2 (l,*,b) -> T2\n", "");
    std::fs::write(&p, text).unwrap();
    let o = run(&["validate", path_str(&p)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.matches("E07-missing-transition").count(), 2, "{err}");
    assert!(err.contains("(s2, (l,a,b))") && err.contains("(s2, (l,b,b))"));
    assert_eq!(code(&run(&["validate", path_str(&instance("figure1.game"))])), 0);
}

#[test]
fn strict_validation_rejects_unused_actions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("spare.game");
    let text = std::fs::read_to_string(instance("unreal.game")).unwrap().replace("actions 0 stay", "actions 0 stay jump");
    let text = text.replace("(stay)", "(*)");
    std::fs::write(&p, text).unwrap();
    assert_eq!(code(&run(&["validate", path_str(&p)])), 0);
    let o = run(&["validate", "--strict", path_str(&p)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("E12-unused-action"));
}

#[test]
fn dot_outputs_parse() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["figure1.game", "unreal.game"] {
        let game = run(&["dot", path_str(&instance(name))]);
        assert_eq!(code(&game), 0);
        let stats = dot_grammar::parse(&String::from_utf8(game.stdout).unwrap()).unwrap();
        assert!(stats.directed);
        let arena = run(&["dot", "--arena", path_str(&instance(name))]);
        assert_eq!(code(&arena), 0);
        dot_grammar::parse(&String::from_utf8(arena.stdout).unwrap()).unwrap();
    }
    let p = dir.path().join("arena.dot");
    assert_eq!(code(&run(&["solve", path_str(&instance("figure1.game")), "--dot-arena", path_str(&p)])), 0);
    let stats = dot_grammar::parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let inst = parse_instance(&instance("figure1.game")).unwrap();
    let pa = ratsynth_core::build_parity_arena(&inst.game, &inst.objectives).unwrap();
    assert_eq!(stats.nodes, pa.len());
    assert_eq!(stats.edges, pa.game.succ.iter().map(Vec::len).sum::<usize>());
}

#[test]
fn dot_grammar_rejects_garbage() {
    assert!(dot_grammar::parse("digraph { a -> }").is_err());
    assert!(dot_grammar::parse("digraph { a [label=\"x] }").is_err());
    assert!(dot_grammar::parse("digraph { a -> b; ").is_err());
    assert!(dot_grammar::parse("graph g { a -- b; c; }").is_ok());
}
