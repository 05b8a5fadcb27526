//! Instance files: a line-oriented text format and an equivalent JSON form.
//!
//! ```text
//! # comment
//! agents 2                 # environment agents 1..n; agent 0 is implicit
//! actions 0 l r
//! actions 1 a b
//! actions 2 a b
//! states s0 s1 s2 T01 T2
//! initial s0
//! s0 (l,*,*) -> s2         # `*` matches every action of that agent
//! objective reach          # reach | safe | buchi | cobuchi | muller
//! target 0 T01             # reach/buchi/cobuchi: the agent's set
//! safe 1 s0 s1             # safe: the states the agent must stay in
//! formula 2 s2 & !s0       # muller: condition on states seen infinitely often
//! ```

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use ratsynth_core::formula::Formula;
use ratsynth_core::game::{ActionId, Defect, GameBuilder, GameStructure, StateId};
use ratsynth_core::objective::{state_set, Objective, ObjectiveClass, ObjectiveProfile};
use ratsynth_core::validate_game;

/// Machine-readable error kinds; each maps to a distinct code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Syntax,
    Json,
    UnknownState,
    UnknownAction,
    Arity,
    MissingTransition,
    ConflictingTransition,
    Structure,
    Objective,
    Formula,
    Strict,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Io => "E01-io",
            ErrorKind::Syntax => "E02-syntax",
            ErrorKind::Json => "E03-json",
            ErrorKind::UnknownState => "E04-unknown-state",
            ErrorKind::UnknownAction => "E05-unknown-action",
            ErrorKind::Arity => "E06-profile-arity",
            ErrorKind::MissingTransition => "E07-missing-transition",
            ErrorKind::ConflictingTransition => "E08-conflicting-transition",
            ErrorKind::Structure => "E09-structure",
            ErrorKind::Objective => "E10-objective",
            ErrorKind::Formula => "E11-formula",
            ErrorKind::Strict => "E12-unused-action",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    /// 1-based; 0 when the error has no single location.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(kind: ErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { kind, line, column, message: message.into() }
    }

    fn global(kind: ErrorKind, message: impl Into<String>) -> Self {
        ParseError::at(kind, 0, 0, message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}: ", self.line, self.column)?;
        }
        write!(f, "error[{}]: {}", self.kind.code(), self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    /// One entry per agent, `"*"` for any action.
    pub profile: Vec<String>,
    pub to: String,
    #[serde(skip)]
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentObjective {
    pub agent: usize,
    /// Target, Büchi or co-Büchi set, or the safe set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip)]
    pub line: usize,
}

/// A parsed but unresolved instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Number of environment agents.
    pub agents: usize,
    /// `actions[i]` for agents `0..=agents`.
    pub actions: Vec<Vec<String>>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<Transition>,
    pub objective: String,
    pub objectives: Vec<AgentObjective>,
}

const KEYWORDS: [&str; 8] = ["agents", "actions", "states", "initial", "objective", "target", "safe", "formula"];

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn parse_usize(t: &Token<'_>, line: usize, what: &str) -> Result<usize, ParseError> {
    t.text.parse().map_err(|_| ParseError::at(ErrorKind::Syntax, line, t.column, format!("expected {what}, found `{}`", t.text)))
}

/// Parses `(x, y, *)` starting at byte `start` of `line`; returns the entries
/// with their columns and the byte offset after `)`.
fn parse_profile(line: &str, start: usize, lno: usize) -> Result<(Vec<(String, usize)>, usize), ParseError> {
    let rest = &line[start..];
    let Some(close) = rest.find(')') else {
        return Err(ParseError::at(ErrorKind::Syntax, lno, start + 1, "unterminated profile, expected `)`"));
    };
    let inner = &rest[1..close];
    let mut entries = Vec::new();
    let mut offset = start + 1;
    for part in inner.split(',') {
        let trimmed = part.trim();
        let col = offset + part.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        if trimmed.is_empty() {
            return Err(ParseError::at(ErrorKind::Syntax, lno, col, "empty profile entry"));
        }
        entries.push((trimmed.to_string(), col));
        offset += part.len() + 1;
    }
    Ok((entries, start + close + 1))
}

pub fn parse_text(text: &str) -> Result<Document, ParseError> {
    let mut agents = None;
    let mut actions: Vec<Option<Vec<String>>> = Vec::new();
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut objective = None;
    let mut transitions = Vec::new();
    let mut objectives = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lno = k + 1;
        let line = strip_comment(raw);
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let syntax = |col: usize, msg: String| ParseError::at(ErrorKind::Syntax, lno, col, msg);
        let arity = |want: usize| {
            if toks.len() != want {
                Err(syntax(head.column, format!("`{}` takes {} argument(s)", head.text, want - 1)))
            } else {
                Ok(())
            }
        };
        match head.text {
            "agents" => {
                arity(2)?;
                let n = parse_usize(&toks[1], lno, "an agent count")?;
                agents = Some(n);
                actions = vec![None; n + 1];
            }
            "actions" => {
                let Some(n) = agents else {
                    return Err(syntax(head.column, "`actions` before `agents`".into()));
                };
                if toks.len() < 3 {
                    return Err(syntax(head.column, "`actions` needs an agent and at least one action".into()));
                }
                let i = parse_usize(&toks[1], lno, "an agent index")?;
                if i > n {
                    return Err(syntax(toks[1].column, format!("agent {i} exceeds the declared {n} environment agents")));
                }
                if actions[i].is_some() {
                    return Err(syntax(toks[1].column, format!("actions of agent {i} declared twice")));
                }
                let names: Vec<String> = toks[2..].iter().map(|t| t.text.to_string()).collect();
                if let Some(t) = toks[2..].iter().find(|t| t.text == "*" || t.text.contains([',', '(', ')'])) {
                    return Err(syntax(t.column, format!("`{}` is not a valid action name", t.text)));
                }
                actions[i] = Some(names);
            }
            "states" => {
                if toks.len() < 2 {
                    return Err(syntax(head.column, "`states` needs at least one state".into()));
                }
                if let Some(t) = toks[1..].iter().find(|t| KEYWORDS.contains(&t.text) || t.text.contains(['(', ')', ','])) {
                    return Err(syntax(t.column, format!("`{}` is not a valid state name", t.text)));
                }
                states = Some(toks[1..].iter().map(|t| t.text.to_string()).collect());
            }
            "initial" => {
                arity(2)?;
                initial = Some(toks[1].text.to_string());
            }
            "objective" => {
                arity(2)?;
                objective = Some(toks[1].text.to_string());
            }
            "target" | "safe" => {
                if toks.len() < 2 {
                    return Err(syntax(head.column, format!("`{}` needs an agent index", head.text)));
                }
                let agent = parse_usize(&toks[1], lno, "an agent index")?;
                let set = toks[2..].iter().map(|t| t.text.to_string()).collect();
                objectives.push((head.text.to_string(), AgentObjective { agent, states: Some(set), formula: None, line: lno }));
            }
            "formula" => {
                if toks.len() < 3 {
                    return Err(syntax(head.column, "`formula` needs an agent index and a formula".into()));
                }
                let agent = parse_usize(&toks[1], lno, "an agent index")?;
                let text = line[toks[2].column - 1..].trim_end().to_string();
                objectives.push(("formula".to_string(), AgentObjective { agent, states: None, formula: Some(text), line: lno }));
                // Formula columns are reported relative to the line.
                let _ = toks[2].column;
            }
            _ => {
                let from = head.text.to_string();
                let open = head.column - 1 + head.text.len();
                let after = line[open..].find(|c: char| !c.is_whitespace()).map(|o| open + o);
                let Some(open) = after.filter(|&o| line[o..].starts_with('(')) else {
                    return Err(syntax(head.column, format!("unknown directive `{}`", head.text)));
                };
                let (entries, end) = parse_profile(line, open, lno)?;
                let rest = line[end..].trim_start();
                let col = line.len() - rest.len() + 1;
                let Some(to) = rest.strip_prefix("->") else {
                    return Err(syntax(col, "expected `->` after the profile".into()));
                };
                let to_toks = tokens(to);
                if to_toks.len() != 1 {
                    return Err(syntax(col, "expected exactly one successor state after `->`".into()));
                }
                transitions.push(Transition {
                    from,
                    profile: entries.into_iter().map(|(e, _)| e).collect(),
                    to: to_toks[0].text.to_string(),
                    line: lno,
                });
            }
        }
    }
    let missing = |what: &str| ParseError::global(ErrorKind::Structure, format!("missing `{what}` declaration"));
    let agents = agents.ok_or_else(|| missing("agents"))?;
    let actions = actions
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.ok_or_else(|| ParseError::global(ErrorKind::Structure, format!("missing `actions {i}` declaration"))))
        .collect::<Result<Vec<_>, _>>()?;
    let objective = objective.ok_or_else(|| missing("objective"))?;
    for (kind, o) in &objectives {
        let expected = match objective.as_str() {
            "safe" => "safe",
            "muller" => "formula",
            _ => "target",
        };
        if kind != expected {
            return Err(ParseError::at(
                ErrorKind::Objective,
                o.line,
                1,
                format!("`{kind}` does not apply to objective class `{objective}`; use `{expected}`"),
            ));
        }
    }
    Ok(Document {
        agents,
        actions,
        states: states.ok_or_else(|| missing("states"))?,
        initial: initial.ok_or_else(|| missing("initial"))?,
        transitions,
        objective,
        objectives: objectives.into_iter().map(|(_, o)| o).collect(),
    })
}

pub fn parse_json(text: &str) -> Result<Document, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::at(ErrorKind::Json, e.line(), e.column(), e.to_string()))
}

impl Document {
    fn state(&self, g: &GameStructure, name: &str, line: usize) -> Result<StateId, ParseError> {
        g.state_by_name(name).ok_or_else(|| ParseError::at(ErrorKind::UnknownState, line, 1, format!("unknown state `{name}`")))
    }

    /// The game, with every declared transition applied. Totality and
    /// determinism are left to [`validate_game`].
    pub fn to_game(&self) -> Result<GameStructure, ParseError> {
        if self.actions.len() != self.agents + 1 {
            return Err(ParseError::global(
                ErrorKind::Structure,
                format!("{} action lists for {} agents", self.actions.len(), self.agents + 1),
            ));
        }
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                return Err(ParseError::global(ErrorKind::Structure, format!("state `{s}` declared twice")));
            }
        }
        for (i, acts) in self.actions.iter().enumerate() {
            let distinct: HashSet<&String> = acts.iter().collect();
            if distinct.len() != acts.len() {
                return Err(ParseError::global(ErrorKind::Structure, format!("agent {i} declares an action twice")));
            }
        }
        let Some(initial) = self.states.iter().position(|s| *s == self.initial) else {
            return Err(ParseError::global(ErrorKind::UnknownState, format!("unknown initial state `{}`", self.initial)));
        };
        let shell = GameBuilder::new(self.states.clone(), StateId(initial), self.actions.clone()).build();
        let mut gb = GameBuilder::new(self.states.clone(), StateId(initial), self.actions.clone());
        for t in &self.transitions {
            let from = self.state(&shell, &t.from, t.line)?;
            let to = self.state(&shell, &t.to, t.line)?;
            if t.profile.len() != self.agents + 1 {
                return Err(ParseError::at(
                    ErrorKind::Arity,
                    t.line,
                    1,
                    format!("profile has {} entries, expected {}", t.profile.len(), self.agents + 1),
                ));
            }
            let pattern =
                t.profile
                    .iter()
                    .enumerate()
                    .map(|(i, a)| match a.as_str() {
                        "*" => Ok(None),
                        name => shell.action_by_name(i, name).map(Some).ok_or_else(|| {
                            ParseError::at(ErrorKind::UnknownAction, t.line, 1, format!("agent {i} has no action `{name}`"))
                        }),
                    })
                    .collect::<Result<Vec<Option<ActionId>>, _>>()?;
            gb.set_pattern(from, &pattern, to).expect("entries resolved above");
        }
        Ok(gb.build())
    }

    pub fn objective_profile(&self, g: &GameStructure) -> Result<ObjectiveProfile, ParseError> {
        let class = ObjectiveClass::from_name(&self.objective).filter(|c| *c != ObjectiveClass::Parity).ok_or_else(|| {
            ParseError::global(
                ErrorKind::Objective,
                format!("unknown objective class `{}` (reach|safe|buchi|cobuchi|muller)", self.objective),
            )
        })?;
        let mut per_agent: Vec<Option<&AgentObjective>> = vec![None; self.agents + 1];
        for o in &self.objectives {
            let slot = per_agent
                .get_mut(o.agent)
                .ok_or_else(|| ParseError::at(ErrorKind::Objective, o.line, 1, format!("agent {} is not declared", o.agent)))?;
            if slot.replace(o).is_some() {
                return Err(ParseError::at(ErrorKind::Objective, o.line, 1, format!("objective of agent {} given twice", o.agent)));
            }
        }
        let ns = g.num_states();
        let objectives = per_agent
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                let o = o.ok_or_else(|| ParseError::global(ErrorKind::Objective, format!("no objective for agent {i}")))?;
                if class == ObjectiveClass::Muller {
                    let text = o
                        .formula
                        .as_deref()
                        .ok_or_else(|| ParseError::at(ErrorKind::Objective, o.line, 1, format!("agent {i} needs a formula")))?;
                    let f = Formula::parse(text, |name| g.state_by_name(name))
                        .map_err(|e| ParseError::at(ErrorKind::Formula, o.line, e.column, format!("agent {i}: {}", e.message)))?;
                    return Ok(Objective::Muller(f));
                }
                let names = o
                    .states
                    .as_deref()
                    .ok_or_else(|| ParseError::at(ErrorKind::Objective, o.line, 1, format!("agent {i} needs a state set")))?;
                let set = names.iter().map(|n| self.state(g, n, o.line)).collect::<Result<Vec<_>, _>>()?;
                let set = state_set(ns, set);
                Ok(match class {
                    ObjectiveClass::Reach => Objective::Reach(set),
                    ObjectiveClass::Safe => Objective::Safe(set),
                    ObjectiveClass::Buchi => Objective::Buchi(set),
                    _ => Objective::CoBuchi(set),
                })
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        ObjectiveProfile::new(g, objectives).map_err(|e| ParseError::global(ErrorKind::Objective, e.to_string()))
    }

    /// Declared actions that no transition names explicitly.
    pub fn unused_actions(&self) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        for (i, acts) in self.actions.iter().enumerate() {
            for a in acts {
                if !self.transitions.iter().any(|t| t.profile.get(i) == Some(a)) {
                    out.push((i, a.clone()));
                }
            }
        }
        out
    }

    /// The fully expanded document of an instance, transitions in state and
    /// profile order.
    pub fn from_instance(g: &GameStructure, objs: &ObjectiveProfile) -> Document {
        let name = |s: StateId| g.state_name(s).to_string();
        let transitions = g
            .states()
            .flat_map(|s| {
                g.profiles().map(move |p| Transition {
                    from: name(s),
                    profile: p.0.iter().enumerate().map(|(i, &a)| g.action_name(i, a).to_string()).collect(),
                    to: name(g.successor(s, &p).expect("validated game")),
                    line: 0,
                })
            })
            .collect();
        let objectives = objs
            .objectives()
            .iter()
            .enumerate()
            .map(|(agent, o)| match o {
                Objective::Muller(f) => AgentObjective { agent, states: None, formula: Some(f.display(&|s| name(s)).to_string()), line: 0 },
                o => {
                    let set = o.set().expect("set-based objective");
                    AgentObjective { agent, states: Some(set.ones().map(|s| name(StateId(s))).collect()), formula: None, line: 0 }
                }
            })
            .collect();
        Document {
            agents: g.num_env(),
            actions: (0..g.num_agents()).map(|i| g.action_names(i).to_vec()).collect(),
            states: g.state_names().to_vec(),
            initial: name(g.initial()),
            transitions,
            objective: objs.class().name().to_string(),
            objectives,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "agents {}", self.agents).unwrap();
        for (i, acts) in self.actions.iter().enumerate() {
            writeln!(out, "actions {i} {}", acts.join(" ")).unwrap();
        }
        writeln!(out, "states {}", self.states.join(" ")).unwrap();
        writeln!(out, "initial {}", self.initial).unwrap();
        for t in &self.transitions {
            writeln!(out, "{} ({}) -> {}", t.from, t.profile.join(","), t.to).unwrap();
        }
        writeln!(out, "objective {}", self.objective).unwrap();
        for o in &self.objectives {
            match (&o.formula, &o.states) {
                (Some(f), _) => writeln!(out, "formula {} {f}", o.agent).unwrap(),
                (None, Some(set)) => {
                    let kw = if self.objective == "safe" { "safe" } else { "target" };
                    let mut line = format!("{kw} {}", o.agent);
                    for s in set {
                        line.push(' ');
                        line.push_str(s);
                    }
                    writeln!(out, "{line}").unwrap();
                }
                (None, None) => {}
            }
        }
        out
    }
}

/// A loaded, validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub document: Document,
    pub game: GameStructure,
    pub objectives: ObjectiveProfile,
}

pub fn defect_kind(d: &Defect) -> ErrorKind {
    match d {
        Defect::MissingTransition { .. } => ErrorKind::MissingTransition,
        Defect::ConflictingTransition { .. } => ErrorKind::ConflictingTransition,
        _ => ErrorKind::Structure,
    }
}

fn defect_error(g: &GameStructure, d: &Defect) -> ParseError {
    ParseError::global(defect_kind(d), describe_defect(g, d))
}

/// One-line description of a validation defect, naming states and profiles.
pub fn describe_defect(g: &GameStructure, d: &Defect) -> String {
    match d {
        Defect::NoStates => "the game has no states".to_string(),
        Defect::InitialOutOfRange { initial } => format!("initial state {} is out of range", initial.0),
        Defect::EmptyActionSet { agent } => format!("agent {} has no actions", agent.0),
        Defect::MissingTransition { state, profile } => {
            format!("missing transition: ({}, {})", g.state_name(*state), g.profile_to_string(profile))
        }
        Defect::DanglingSuccessor { state, profile, successor } => {
            format!("dangling successor {} for ({}, {})", successor.0, g.state_name(*state), g.profile_to_string(profile))
        }
        Defect::ConflictingTransition { state, profile, first, second } => format!(
            "conflicting transition: ({}, {}) -> {} and -> {}",
            g.state_name(*state),
            g.profile_to_string(profile),
            g.state_name(*first),
            g.state_name(*second)
        ),
    }
}

pub fn parse_document(text: &str, json: bool) -> Result<Document, ParseError> {
    if json {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

pub fn instance_from_document(document: Document) -> Result<Instance, ParseError> {
    let game = document.to_game()?;
    let report = validate_game(&game);
    if let Some(d) = report.defects.first() {
        return Err(defect_error(&game, d));
    }
    let objectives = document.objective_profile(&game)?;
    Ok(Instance { document, game, objectives })
}

pub fn parse_instance_str(text: &str, json: bool) -> Result<Instance, ParseError> {
    instance_from_document(parse_document(text, json)?)
}

pub fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

pub fn read_source(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError::global(ErrorKind::Io, format!("{}: {e}", path.display())))
}

/// Reads, parses and validates an instance file; `.json` files use the JSON form.
pub fn parse_instance(path: &Path) -> Result<Instance, ParseError> {
    parse_instance_str(&read_source(path)?, is_json_path(path))
}
