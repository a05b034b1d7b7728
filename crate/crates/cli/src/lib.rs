//! Command-line front end: compile a knowledge base, plan a dish, list order
//! statistics and check the optimizer against exhaustive search.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use recipe_core::compression::optimize;
use recipe_core::format::{compile_kb, parse_db, parse_supplies, write_db};
use recipe_core::oracle::{OracleError, OracleReport};
use recipe_core::realization::{hms, realize_with, RealizeOptions};
use recipe_core::scheduling::{build_requires_graph, remove_and_stitch, DEFAULT_ORDER_LIMIT};
use recipe_core::selection::{select_content_with, ProducerChoice, Selection};
use recipe_core::{
    DescriptiveString, InsufficientIngredients, KnowledgeBase, Process, RequiresGraph,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INSUFFICIENT: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "recipe-plan", version, about = "Plan a dish from a knowledge base and a list of supplies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a knowledge-base file into a database file.
    Produce {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the fastest recipe for a dish.
    Plan {
        #[command(flatten)]
        query: Query,
        /// Say "while boiling" rather than "while boil".
        #[arg(long)]
        gerund: bool,
    },
    /// Count permissible orders and list their compressed totals.
    Orders {
        #[command(flatten)]
        query: Query,
    },
    /// Compare the optimizer with exhaustive search.
    Verify {
        #[command(flatten)]
        query: Query,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Query {
    pub dish: String,
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long)]
    pub supplies: PathBuf,
    /// Give up after this many permissible orders.
    #[arg(long, default_value_t = DEFAULT_ORDER_LIMIT)]
    pub limit: usize,
    /// Pick among competing producers at random with this seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Why a command stopped early.
#[derive(Debug)]
enum Failure {
    Input(String),
    Insufficient(InsufficientIngredients),
}

impl Failure {
    fn report(self, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
        match self {
            Failure::Input(message) => {
                writeln!(err, "error: {message}")?;
                Ok(EXIT_INPUT)
            }
            Failure::Insufficient(missing) => {
                writeln!(out, "{}", InsufficientIngredients::MESSAGE)?;
                for s in &missing.needed {
                    writeln!(out, "{s}")?;
                }
                Ok(EXIT_INSUFFICIENT)
            }
        }
    }
}

/// Runs one command. Normal output goes to `out`, diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let result = match &cli.command {
        Command::Produce { kb, out: path } => produce(kb, path, out),
        Command::Plan { query, gerund } => plan(query, *gerund, out),
        Command::Orders { query } => orders(query, out),
        Command::Verify { query } => verify(query, out),
    };
    match result {
        Ok(code) => Ok(code),
        Err(Outcome::Io(e)) => Err(e),
        Err(Outcome::Failed(f)) => f.report(out, err),
    }
}

enum Outcome {
    Io(io::Error),
    Failed(Failure),
}

impl From<io::Error> for Outcome {
    fn from(e: io::Error) -> Self {
        Outcome::Io(e)
    }
}

impl From<Failure> for Outcome {
    fn from(f: Failure) -> Self {
        Outcome::Failed(f)
    }
}

fn input_error(message: impl Into<String>) -> Outcome {
    Outcome::Failed(Failure::Input(message.into()))
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn produce(kb_path: &Path, out_path: &Path, out: &mut dyn Write) -> Result<i32, Outcome> {
    let text = read(kb_path)?;
    let kb = compile_kb(&text).map_err(|e| input_error(format!("{}: {e}", kb_path.display())))?;
    fs::write(out_path, write_db(&kb))
        .map_err(|e| input_error(format!("cannot write {}: {e}", out_path.display())))?;
    writeln!(out, "strings: {}", kb.can_make().len())?;
    writeln!(out, "processes: {}", kb.skills().len())?;
    Ok(EXIT_OK)
}

/// A dish, the ingredients it draws from the supplies and the ghost-free
/// processes with their stitched precedence.
struct Prepared {
    dish: DescriptiveString,
    ingredients: Vec<DescriptiveString>,
    processes: Vec<Process>,
    graph: RequiresGraph,
}

fn prepare(query: &Query) -> Result<Prepared, Outcome> {
    let dish = DescriptiveString::new(&query.dish).map_err(|e| input_error(format!("dish: {e}")))?;
    let kb: KnowledgeBase = {
        let text = read(&query.db)?;
        parse_db(&text).map_err(|e| input_error(format!("{}: {e}", query.db.display())))?
    };
    let supplies: BTreeSet<DescriptiveString> = parse_supplies(&read(&query.supplies)?);
    let choice = query.seed.map_or(ProducerChoice::First, ProducerChoice::Seeded);

    let content = match select_content_with(&dish, &supplies, &kb, choice) {
        Ok(Selection::Selected(c)) => c,
        Ok(Selection::Insufficient(missing)) => return Err(Failure::Insufficient(missing).into()),
        Err(e) => return Err(input_error(e.to_string())),
    };
    let graph = build_requires_graph(&content.action_list).map_err(|e| input_error(e.to_string()))?;
    let (processes, graph) = remove_and_stitch(&content.action_list, &graph);
    Ok(Prepared {
        dish,
        ingredients: content.ingred_list,
        processes,
        graph,
    })
}

fn plan(query: &Query, gerund: bool, out: &mut dyn Write) -> Result<i32, Outcome> {
    let p = prepare(query)?;
    let best = optimize(&p.processes, &p.graph, query.limit).map_err(|e| input_error(e.to_string()))?;
    let recipe = realize_with(&p.dish, &p.ingredients, &best.plan, RealizeOptions { gerund });
    write!(out, "{recipe}")?;
    Ok(EXIT_OK)
}

fn orders(query: &Query, out: &mut dyn Write) -> Result<i32, Outcome> {
    let p = prepare(query)?;
    let best = optimize(&p.processes, &p.graph, query.limit).map_err(|e| input_error(e.to_string()))?;
    let mut totals = best.totals;
    totals.sort_unstable();
    writeln!(out, "orders: {}", totals.len())?;
    let (min, max) = (totals[0], totals[totals.len() - 1]);
    writeln!(out, "min makespan: {min} ({})", hms(min))?;
    writeln!(out, "max makespan: {max} ({})", hms(max))?;
    writeln!(out, "makespans:")?;
    for t in totals {
        writeln!(out, "{t}")?;
    }
    Ok(EXIT_OK)
}

fn verify(query: &Query, out: &mut dyn Write) -> Result<i32, Outcome> {
    let p = prepare(query)?;
    let report = match OracleReport::check(p.dish.as_str(), &p.processes, &p.graph, query.limit) {
        Ok(r) => r,
        Err(e @ OracleError::TooLarge { .. }) => return Err(input_error(e.to_string())),
        Err(OracleError::Schedule(e)) => return Err(input_error(e.to_string())),
    };
    write!(out, "{}", report.to_text())?;
    Ok(if report.agrees { EXIT_OK } else { EXIT_DISAGREE })
}
