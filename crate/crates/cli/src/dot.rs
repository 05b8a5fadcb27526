//! Graphviz output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ratsynth_core::game::GameStructure;
use ratsynth_core::reductions::{Annotation, ParityArena};
use ratsynth_core::solvers::Player;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// The game graph; parallel transitions are merged into one edge whose label
/// lists their profiles.
pub fn game_dot(g: &GameStructure) -> String {
    let mut out = String::from("digraph game {\n  rankdir=LR;\n  __start [shape=point];\n");
    for s in g.states() {
        let shape = if s == g.initial() { "doublecircle" } else { "circle" };
        writeln!(out, "  s{} [label={}, shape={shape}];", s.0, quote(g.state_name(s))).unwrap();
    }
    writeln!(out, "  __start -> s{};", g.initial().0).unwrap();
    for s in g.states() {
        let mut edges: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for p in g.profiles() {
            let t = g.successor(s, &p).expect("validated game");
            edges.entry(t.0).or_default().push(g.profile_to_string(&p));
        }
        for (t, labels) in edges {
            writeln!(out, "  s{} -> s{t} [label={}];", s.0, quote(&labels.join("\n"))).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn annotation(a: &Annotation, g: &GameStructure) -> String {
    let counter = |c: Option<usize>| c.map_or("-1".to_string(), |i| i.to_string());
    match a {
        Annotation::ReachSafe { p } => format!("P={p}"),
        Annotation::Buchi { c_d, c_w, b } => format!("cD={} cW={} b={}", counter(*c_d), counter(*c_w), u8::from(*b)),
        Annotation::CoBuchi => String::new(),
        Annotation::Muller { record, hit } => {
            let names: Vec<&str> = record.iter().map(|&s| g.state_name(s)).collect();
            format!("[{}] h={hit}", names.join(" "))
        }
    }
}

/// The reachable parity arena: Eve nodes are boxes, Adam nodes diamonds.
pub fn arena_dot(pa: &ParityArena, g: &GameStructure) -> String {
    let mut out = String::from("digraph arena {\n");
    for (v, q) in pa.nodes.iter().enumerate() {
        let shape = match pa.game.owner[v] {
            Player::Eve => "box",
            Player::Adam => "diamond",
        };
        let mut label = format!("{}\np={}", q.base.display(g), pa.game.priority[v]);
        let extra = annotation(&q.extra, g);
        if !extra.is_empty() {
            label.push(' ');
            label.push_str(&extra);
        }
        let style = if v == pa.initial() { ", penwidth=2" } else { "" };
        writeln!(out, "  n{v} [label={}, shape={shape}{style}];", quote(&label)).unwrap();
    }
    for (v, succ) in pa.game.succ.iter().enumerate() {
        for t in succ {
            writeln!(out, "  n{v} -> n{t};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
