//! Command-line front end.
//!
//! Exit codes: 0 success or "yes", 1 "no" or an I/O / parse failure of an input
//! file, 2 validation errors, fragment violations and failed preconditions.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::environment::{load_graph, parse_events, validate, AttributedGraph, Behavior};
use crate::formula::{parse, Formula};
use crate::miner::{merge, mine, MineError, MiningMode, Specification};
use crate::reactor::react;
use crate::tableau::{build_tree, TableauError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_IO: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "behaviorspec",
    version,
    about = "Mine and reason over temporal behavior specifications"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Literal,
    PaperExample,
}

impl From<ModeArg> for MiningMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Literal => MiningMode::Literal,
            ModeArg::PaperExample => MiningMode::PaperExample,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Query {
    Sat,
    Unsat,
    Valid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TriggerPolicy {
    /// React to every event's node as it arrives.
    EveryEvent,
    /// Only mine; no reactions.
    OnDemand,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine a merged specification from an event log.
    Mine {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(long, value_enum, default_value = "paper-example")]
        mode: ModeArg,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide satisfiability, unsatisfiability or validity of a formula.
    Decide {
        #[arg(value_enum)]
        query: Query,
        formula: String,
        /// Print the truth tree.
        #[arg(long)]
        tree: bool,
    },
    /// React to a trigger formula for one object and print proposed actions.
    React {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        object: String,
        #[arg(long)]
        trigger: String,
        /// Where to write the updated specification.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the full reaction report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include the truth tree in the report and print it to standard error.
        #[arg(long)]
        tree: bool,
    },
    /// Replay an event log through mining and, optionally, reactions.
    Replay {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        events: PathBuf,
        /// Initial specification.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "paper-example")]
        mode: ModeArg,
        /// Events per mining batch; the whole log when absent.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        window: Option<u64>,
        #[arg(long, value_enum, default_value = "on-demand")]
        trigger_policy: TriggerPolicy,
        /// Where to write the final specification; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Settings for [`replay`].
#[derive(Debug, Clone)]
pub struct ReplayConfig {
    pub graph_path: PathBuf,
    pub events_path: PathBuf,
    pub spec_path: Option<PathBuf>,
    pub mode: MiningMode,
    pub window: usize,
    pub trigger_policy: TriggerPolicy,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(EXIT_IO, format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(|e| fail(EXIT_IO, e)),
    }
}

fn parse_formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| fail(EXIT_ERROR, format!("formula: {e}")))
}

fn load_inputs(graph: &Path, events: &Path) -> Result<(AttributedGraph, Behavior), Failure> {
    let graph = load_graph(&read(graph)?).map_err(|e| fail(EXIT_IO, e))?;
    let behavior = parse_events(&read(events)?).map_err(|e| fail(EXIT_IO, e))?;
    validate(&behavior, &graph).map_err(|e| fail(EXIT_ERROR, e))?;
    if behavior.is_empty() {
        return Err(fail(EXIT_ERROR, MineError::EmptyBehavior));
    }
    Ok((graph, behavior))
}

fn load_spec(path: &Path) -> Result<Specification, Failure> {
    Specification::from_json(&read(path)?).map_err(|e| fail(EXIT_ERROR, e))
}

fn mine_merged(
    behavior: &Behavior,
    graph: &AttributedGraph,
    mode: MiningMode,
) -> Result<Specification, Failure> {
    let specs = mine(behavior, graph, mode).map_err(|e| fail(EXIT_ERROR, e))?;
    merge(specs.into_iter().collect()).map_err(|e| fail(EXIT_ERROR, e))
}

/// Parses `args` and runs the command, writing to the process's standard streams.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    execute(cli.command, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs a parsed command against the given output streams.
pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match command {
        Command::Mine {
            graph,
            events,
            mode,
            out: dest,
        } => cmd_mine(&graph, &events, mode.into(), dest.as_deref(), out),
        Command::Decide {
            query,
            formula,
            tree,
        } => cmd_decide(&formula, query, tree, out),
        Command::React {
            spec,
            object,
            trigger,
            out: dest,
            report,
            tree,
        } => cmd_react(
            &spec,
            &object,
            &trigger,
            dest.as_deref(),
            report.as_deref(),
            tree,
            out,
            err,
        ),
        Command::Replay {
            graph,
            events,
            spec,
            mode,
            window,
            trigger_policy,
            out: dest,
        } => {
            let config = ReplayConfig {
                graph_path: graph,
                events_path: events,
                spec_path: spec,
                mode: mode.into(),
                window: window.map_or(usize::MAX, |w| w as usize),
                trigger_policy,
            };
            cmd_replay(&config, dest.as_deref(), out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_mine(
    graph: &Path,
    events: &Path,
    mode: MiningMode,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let (graph, behavior) = load_inputs(graph, events)?;
    let sigma = mine_merged(&behavior, &graph, mode)?;
    write_or_print(dest, &sigma.to_json(), out)?;
    Ok(EXIT_OK)
}

fn cmd_decide(
    text: &str,
    query: Query,
    show_tree: bool,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let formula = parse_formula(text)?;
    let root = match query {
        Query::Sat | Query::Unsat => formula,
        Query::Valid => Formula::not(formula).push_negation(),
    };
    let tree = build_tree(&root).map_err(|e| fail(EXIT_ERROR, e))?;
    let yes = match query {
        Query::Sat => tree.has_open_branch(),
        Query::Unsat | Query::Valid => tree.is_closed(),
    };
    let io = |e: std::io::Error| fail(EXIT_IO, e);
    if show_tree {
        write!(out, "{}", tree.dump()).map_err(io)?;
    }
    writeln!(out, "{}", if yes { "yes" } else { "no" }).map_err(io)?;
    Ok(if yes { EXIT_OK } else { EXIT_NO })
}

#[allow(clippy::too_many_arguments)]
fn cmd_react(
    spec: &Path,
    object: &str,
    trigger: &str,
    dest: Option<&Path>,
    report: Option<&Path>,
    show_tree: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, Failure> {
    let sigma = load_spec(spec)?;
    let trigger = parse_formula(trigger)?;
    let result = react(&sigma, &trigger, object).map_err(|e| fail(EXIT_ERROR, e))?;
    let io = |e: std::io::Error| fail(EXIT_IO, e);
    for action in &result.actions {
        writeln!(out, "{action}").map_err(io)?;
    }
    if show_tree {
        write!(err, "{}", result.tree.dump()).map_err(io)?;
    }
    if let Some(path) = dest {
        write_or_print(Some(path), &result.updated_spec.to_json(), out)?;
    }
    if let Some(path) = report {
        write_or_print(Some(path), &result.to_json(show_tree), out)?;
    }
    Ok(EXIT_OK)
}

/// Streams the log in time order. Every `window` events the whole history seen
/// so far is mined again and replaces the previously mined formulas.
pub fn replay(
    config: &ReplayConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Specification, String> {
    replay_inner(config, out, err).map_err(|f| f.message)
}

fn replay_inner(
    config: &ReplayConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Specification, Failure> {
    if config.window == 0 {
        return Err(fail(EXIT_ERROR, "window must be at least 1"));
    }
    let (graph, mut behavior) = load_inputs(&config.graph_path, &config.events_path)?;
    let initial = match &config.spec_path {
        Some(p) => load_spec(p)?,
        None => Specification::new(),
    };
    behavior.events.sort_by_key(|e| e.time);

    let combine = |mined: &Specification| {
        let mut sigma = initial.clone();
        for e in mined.iter() {
            sigma.insert(e.clone());
        }
        sigma
    };
    let io = |e: std::io::Error| fail(EXIT_IO, e);

    let mut seen = Behavior::default();
    let mut mined = Specification::new();
    for event in &behavior.events {
        seen.events.push(event.clone());
        if config.trigger_policy == TriggerPolicy::EveryEvent {
            let sigma = combine(&mined);
            let trigger = Formula::atom(event.node.as_str());
            match react(&sigma, &trigger, &event.object) {
                Ok(r) => writeln!(
                    out,
                    "{} {} {}: {}",
                    event.time,
                    event.object,
                    event.node,
                    if r.actions.is_empty() {
                        "-".to_string()
                    } else {
                        r.actions.join(" ")
                    }
                )
                .map_err(io)?,
                Err(e) => {
                    writeln!(err, "warning: {} {}: {e}", event.time, event.object).map_err(io)?
                }
            }
        }
        if seen.len() % config.window == 0 {
            mined = mine_merged(&seen, &graph, config.mode)?;
        }
    }
    if seen.len() % config.window != 0 {
        mined = mine_merged(&seen, &graph, config.mode)?;
    }
    Ok(combine(&mined))
}

fn cmd_replay(
    config: &ReplayConfig,
    dest: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, Failure> {
    let sigma = replay_inner(config, out, err)?;
    write_or_print(dest, &sigma.to_json(), out)?;
    Ok(EXIT_OK)
}

impl From<TableauError> for Failure {
    fn from(e: TableauError) -> Self {
        fail(EXIT_ERROR, e)
    }
}
