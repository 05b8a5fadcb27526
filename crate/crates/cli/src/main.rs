use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ratsynth::commands::{self, GenOptions, SolveOptions, WitnessStyle};
use ratsynth_core::reductions::DEFAULT_NODE_LIMIT;
use ratsynth_core::SolverChoice;

/// Decides whether agent 0 has a strategy that wins against every rational
/// response of the other agents, and produces one.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Finite,
    Parity,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Witness {
    Compact,
    Derived,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance. Exit 0 = YES, 1 = NO, 2 = input error, 3 = disagreement.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        solver: Solver,
        /// Also run the brute-force oracle and compare.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "compact")]
        witness: Witness,
        /// Write agent 0's strategy as JSON.
        #[arg(long, value_name = "PATH")]
        emit_strategy: Option<PathBuf>,
        /// Write the compiled parity arena as DOT.
        #[arg(long, value_name = "PATH")]
        dot_arena: Option<PathBuf>,
        /// Write the result document as JSON.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: usize,
    },
    /// Generate a random instance; the same flags give the same bytes.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        actions: usize,
        #[arg(long, default_value = "reach")]
        class: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        /// Emit the JSON form instead of text.
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report every defect of an instance; exit 0 iff there are none.
    Validate {
        instance: PathBuf,
        /// Also reject actions that no transition line names.
        #[arg(long)]
        strict: bool,
    },
    /// Check a strategy file against an instance; exit 0 iff it is a solution.
    Check { instance: PathBuf, strategy: PathBuf },
    /// Print the game graph, or the compiled arena, as DOT.
    Dot {
        instance: PathBuf,
        #[arg(long)]
        arena: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RATSYNTH_LOG", "warn")).init();
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Solve { instance, solver, oracle, witness, emit_strategy, dot_arena, json, node_limit } => {
            let opts = SolveOptions {
                instance,
                solver: match solver {
                    Solver::Finite => SolverChoice::Finite,
                    Solver::Parity => SolverChoice::Parity,
                    Solver::Both => SolverChoice::Both,
                },
                oracle,
                witness: match witness {
                    Witness::Compact => WitnessStyle::Compact,
                    Witness::Derived => WitnessStyle::Derived,
                },
                emit_strategy,
                dot_arena,
                json,
                node_limit,
            };
            commands::cmd_solve(&opts, &mut out, &mut err)
        }
        Command::Gen { states, agents, actions, class, seed, density, json, output } => {
            let opts = GenOptions { states, agents, actions, class, seed, density, json };
            commands::cmd_gen(&opts, output.as_deref(), &mut out, &mut err)
        }
        Command::Validate { instance, strict } => commands::cmd_validate(&instance, strict, &mut out, &mut err),
        Command::Check { instance, strategy } => commands::cmd_check(&instance, &strategy, &mut out, &mut err),
        Command::Dot { instance, arena, output } => commands::cmd_dot(&instance, arena, output.as_deref(), &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
