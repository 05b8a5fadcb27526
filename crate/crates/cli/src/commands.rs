//! Subcommand implementations. Each writes to the given streams and returns
//! the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};

use ratsynth_core::oracle::{brute_force_report, OracleReport, ORACLE_NODE_LIMIT};
use ratsynth_core::random::{random_instance, rng, InstanceShape};
use ratsynth_core::reductions::{build_parity_arena_with, DEFAULT_NODE_LIMIT};
use ratsynth_core::synthesis::{compact_witness, ncrsp_solve_with, SynthesisError};
use ratsynth_core::{check_solution, validate_game, Answer, Arena, ObjectiveClass, SolverChoice};

use crate::dot::{arena_dot, game_dot};
use crate::format::{
    defect_kind, describe_defect, is_json_path, parse_document, parse_instance, read_source, Document, ErrorKind, Instance, ParseError,
};
use crate::report::{OracleSummary, ResultDocument, StatsDocument, StrategyDocument};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;

/// Memoryless candidates tried when compacting a witness.
pub const COMPACT_LIMIT: usize = 1024;

/// Largest transition table `gen` will write.
pub const GEN_TABLE_LIMIT: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessStyle {
    /// The first memoryless strategy that certifies, if any, else `Derived`.
    Compact,
    /// Read off the parity solver's strategy.
    Derived,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub instance: PathBuf,
    pub solver: SolverChoice,
    pub oracle: bool,
    pub witness: WitnessStyle,
    pub emit_strategy: Option<PathBuf>,
    pub dot_arena: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub node_limit: usize,
}

impl SolveOptions {
    pub fn new(instance: impl Into<PathBuf>) -> Self {
        SolveOptions {
            instance: instance.into(),
            solver: SolverChoice::Both,
            oracle: false,
            witness: WitnessStyle::Compact,
            emit_strategy: None,
            dot_arena: None,
            json: None,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

pub fn solver_name(choice: SolverChoice) -> &'static str {
    match choice {
        SolverChoice::Parity => "parity",
        SolverChoice::Finite => "finite",
        SolverChoice::Both => "both",
    }
}

fn input_error(err: &mut dyn Write, e: &ParseError) -> i32 {
    let _ = writeln!(err, "{e}");
    EXIT_INPUT
}

fn write_file(path: &Path, contents: &str, err: &mut dyn Write) -> Result<(), i32> {
    std::fs::write(path, contents).map_err(|e| {
        let _ = writeln!(err, "error[{}]: {}: {e}", ErrorKind::Io.code(), path.display());
        EXIT_INPUT
    })
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Instance, i32> {
    parse_instance(path).map_err(|e| input_error(err, &e))
}

pub fn cmd_solve(opts: &SolveOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match solve(opts, out, err) {
        Ok(code) | Err(code) => code,
    }
}

fn solve(opts: &SolveOptions, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, i32> {
    let start = Instant::now();
    let inst = load(&opts.instance, err)?;
    let (g, objs) = (&inst.game, &inst.objectives);
    // The oracle shares nothing with the solver pipeline, so it runs alongside.
    let (outcome, oracle) = std::thread::scope(|scope| {
        let oracle = opts.oracle.then(|| scope.spawn(|| brute_force_report(g, objs, ORACLE_NODE_LIMIT)));
        let outcome = ncrsp_solve_with(g, objs, opts.solver, opts.node_limit);
        (outcome, oracle.map(|h| h.join().expect("oracle thread panicked")))
    });
    let outcome = outcome.map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        match e {
            SynthesisError::Reduction(_) | SynthesisError::Solver(_) => EXIT_INPUT,
            SynthesisError::Strategy(_) | SynthesisError::Disagreement { .. } => EXIT_DISAGREEMENT,
        }
    })?;
    if opts.solver == SolverChoice::Both {
        info!("parity and finite-duration solvers agree: {}", outcome.answer);
    }
    let mut stats = StatsDocument::new(solver_name(opts.solver), objs.class().name(), &outcome.stats);
    if let Some(report) = oracle {
        let OracleReport { answer, nodes, blocks } = report.map_err(|e| {
            let _ = writeln!(err, "error: oracle: {e}");
            EXIT_INPUT
        })?;
        if answer != outcome.answer {
            let _ = writeln!(err, "error: solver says {}, oracle says {answer}", outcome.answer);
            return Err(EXIT_DISAGREEMENT);
        }
        info!("oracle agrees: {answer} ({nodes} nodes, {blocks} blocks)");
        let _ = writeln!(err, "oracle agrees: {answer}");
        stats.oracle = Some(OracleSummary { answer: answer.to_string(), nodes, blocks });
    }
    // Finite-only runs have no strategy to read off; the parity pipeline supplies one.
    let derived = match (outcome.answer, outcome.witness) {
        (Answer::Yes, Some(w)) => Some(w),
        (Answer::Yes, None) => {
            let again = ncrsp_solve_with(g, objs, SolverChoice::Parity, opts.node_limit).map_err(|e| {
                let _ = writeln!(err, "error: {e}");
                EXIT_DISAGREEMENT
            })?;
            Some(again.witness.ok_or(EXIT_DISAGREEMENT)?)
        }
        (Answer::No, _) => None,
    };
    let witness = derived.map(|w| match opts.witness {
        WitnessStyle::Compact => compact_witness(g, objs, &w, COMPACT_LIMIT),
        WitnessStyle::Derived => w,
    });
    if let Some(sigma) = &witness {
        let report = check_solution(g, objs, sigma).map_err(|e| {
            let _ = writeln!(err, "error: witness check: {e}");
            EXIT_DISAGREEMENT
        })?;
        if !report.valid {
            let _ = writeln!(err, "error: the witness fails its own check");
            return Err(EXIT_DISAGREEMENT);
        }
    }
    if let Some(path) = &opts.dot_arena {
        let pa = build_parity_arena_with(Arena::new(g), objs, opts.node_limit).map_err(|e| {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        })?;
        write_file(path, &arena_dot(&pa, g), err)?;
    }
    let strategy = witness.as_ref().map(|s| StrategyDocument::from_sigma(g, s));
    if let Some(path) = &opts.emit_strategy {
        match &strategy {
            Some(doc) => write_file(path, &(serde_json::to_string_pretty(doc).expect("plain data") + "\n"), err)?,
            None => warn!("no strategy to emit: the answer is NO"),
        }
    }
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let doc = ResultDocument::new(outcome.answer, strategy, stats);
    if let Some(path) = &opts.json {
        write_file(path, &doc.to_json(), err)?;
    }
    let _ = writeln!(out, "{}", outcome.answer);
    if let Some(sigma) = &witness {
        for m in sigma.reachable() {
            let n = &sigma.nodes[m];
            let _ = writeln!(out, "  m{m} at {}: play {}", g.state_name(n.state), g.action_name(0, n.action));
        }
    }
    Ok(match outcome.answer {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
    })
}

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub states: usize,
    pub agents: usize,
    pub actions: usize,
    pub class: String,
    pub seed: u64,
    pub density: f64,
    pub json: bool,
}

/// The instance text for a generator configuration.
pub fn generate(opts: &GenOptions) -> Result<String, ParseError> {
    let shape_error = |m: String| ParseError { kind: ErrorKind::Structure, line: 0, column: 0, message: m };
    let class = ObjectiveClass::from_name(&opts.class)
        .filter(|c| *c != ObjectiveClass::Parity)
        .ok_or_else(|| shape_error(format!("unknown class `{}` (reach|safe|buchi|cobuchi|muller)", opts.class)))?;
    let shape = InstanceShape { states: opts.states, agents: opts.agents, actions: opts.actions, class, density: opts.density };
    shape.check().map_err(shape_error)?;
    let table = u32::try_from(opts.agents + 1)
        .ok()
        .and_then(|e| opts.actions.checked_pow(e))
        .and_then(|p| p.checked_mul(opts.states))
        .filter(|&t| t <= GEN_TABLE_LIMIT)
        .ok_or_else(|| shape_error(format!("transition table exceeds {GEN_TABLE_LIMIT} entries")))?;
    info!("generating {table} transitions");
    let (g, objs) = random_instance(&shape, &mut rng(opts.seed)).map_err(|e| shape_error(e.to_string()))?;
    let doc = Document::from_instance(&g, &objs);
    Ok(if opts.json {
        serde_json::to_string_pretty(&doc).expect("plain data") + "\n"
    } else {
        format!(
            "# seed {} states {} agents {} actions {} class {} density {}\n{}",
            opts.seed,
            opts.states,
            opts.agents,
            opts.actions,
            class.name(),
            opts.density,
            doc.to_text()
        )
    })
}

pub fn cmd_gen(opts: &GenOptions, output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match generate(opts) {
        Ok(t) => t,
        Err(e) => return input_error(err, &e),
    };
    match output {
        Some(path) => match write_file(path, &text, err) {
            Ok(()) => 0,
            Err(code) => code,
        },
        None => {
            let _ = out.write_all(text.as_bytes());
            0
        }
    }
}

/// Prints every defect rather than stopping at the first.
pub fn cmd_validate(path: &Path, strict: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let doc = match read_source(path).and_then(|t| parse_document(&t, is_json_path(path))) {
        Ok(d) => d,
        Err(e) => return input_error(err, &e),
    };
    let g = match doc.to_game() {
        Ok(g) => g,
        Err(e) => return input_error(err, &e),
    };
    let report = validate_game(&g);
    let mut failed = false;
    for d in &report.defects {
        let _ = writeln!(err, "error[{}]: {}", defect_kind(d).code(), describe_defect(&g, d));
        failed = true;
    }
    if report.is_ok() {
        if let Err(e) = doc.objective_profile(&g) {
            let _ = writeln!(err, "{e}");
            failed = true;
        }
    }
    if strict {
        for (i, a) in doc.unused_actions() {
            let _ = writeln!(err, "error[{}]: action `{a}` of agent {i} is never named", ErrorKind::Strict.code());
            failed = true;
        }
    }
    if failed {
        return EXIT_INPUT;
    }
    let _ = writeln!(out, "ok: {} states, {} agents, {} transitions", g.num_states(), g.num_agents(), g.num_states() * g.num_profiles());
    0
}

/// Exit 0 if the strategy solves the instance, 1 if not.
pub fn cmd_check(instance: &Path, strategy: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let inst = match load(instance, err) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let g = &inst.game;
    let sigma = read_source(strategy).and_then(|text| {
        let doc: StrategyDocument = serde_json::from_str(&text).map_err(|e| ParseError {
            kind: ErrorKind::Json,
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.to_sigma(g).map_err(|m| ParseError { kind: ErrorKind::Structure, line: 0, column: 0, message: m })
    });
    let sigma = match sigma {
        Ok(s) => s,
        Err(e) => return input_error(err, &e),
    };
    match check_solution(g, &inst.objectives, &sigma) {
        Ok(r) if r.valid => {
            let _ = writeln!(out, "valid");
            0
        }
        Ok(r) => {
            let _ = writeln!(out, "invalid");
            if let Some(c) = r.counterexample {
                let losing: Vec<String> = c.losing.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "  play: {}", c.play.display(g));
                let _ = writeln!(out, "  losing agents without a good deviation: {}", losing.join(" "));
            }
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// The game graph, or with `arena` the compiled parity arena.
pub fn cmd_dot(instance: &Path, arena: bool, output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let inst = match load(instance, err) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let text = if arena {
        match build_parity_arena_with(Arena::new(&inst.game), &inst.objectives, DEFAULT_NODE_LIMIT) {
            Ok(pa) => arena_dot(&pa, &inst.game),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        }
    } else {
        game_dot(&inst.game)
    };
    match output {
        Some(path) => match write_file(path, &text, err) {
            Ok(()) => 0,
            Err(code) => code,
        },
        None => {
            let _ = out.write_all(text.as_bytes());
            0
        }
    }
}
