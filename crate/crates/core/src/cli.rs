//! Command-line front end. `run_cli` returns the process exit code:
//! 0 success, 1 transformation stuck or inconsistent, 2 bad input, 3 usage.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tempfile::NamedTempFile;

use crate::dot::export_dot;
use crate::engine::{
    backward_transform, check_consistency, forward_transform, ApplicationRecord, Registries, TransformError,
};
use crate::flowgraphs::{catalog, load_rules, registries, RULES_JSON};
use crate::graph::json::{graph_from_json, graph_to_json, triple_from_json, triple_to_json};
use crate::graph::{Graph, TripleModel};
use crate::minijava::{parse_program, unparse_program};
use crate::rules::RuleSet;

#[derive(Parser, Debug)]
#[command(name = "tggflow", version, about = "Mini-Java <-> control-flow graph transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a source file into an AST graph (JSON).
    Parse(Io),
    /// Print the source text of an AST graph or of a triple's source side.
    Unparse(Io),
    /// Source file -> triple (JSON).
    Forward(Transform),
    /// Flow graph or triple (JSON) -> triple with the rebuilt AST.
    Backward(Transform),
    /// Source -> forward -> backward -> source text.
    Roundtrip(Transform),
    /// Check that a triple is consistent with the rule set.
    Check(Transform),
}

#[derive(Args, Debug)]
struct Io {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Transform {
    #[command(flatten)]
    io: Io,
    /// Also write the flow graph as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Log rule applications to stderr and draw corr links in DOT output.
    #[arg(long)]
    trace: bool,
    /// Rule set JSON to use instead of the built-in one.
    #[arg(long)]
    rules: Option<PathBuf>,
}

enum Failure {
    Stuck(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Stuck(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Stuck(m) | Failure::Input(m) => m,
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::WrongMetamodel { .. } => Failure::Input(e.to_string()),
            _ => Failure::Stuck(e.to_string()),
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Parse(io) => {
            let ast = parse_file(&io.input)?;
            emit(io.output.as_deref(), &graph_to_json(&ast))
        }
        Command::Unparse(io) => {
            let ast = load_graph(&io.input, Side::Source)?;
            let text = unparse_program(&ast).map_err(|e| Failure::Input(format!("{}: {e}", io.input.display())))?;
            emit(io.output.as_deref(), &text)
        }
        Command::Forward(t) => {
            let (rules, reg) = rule_set(&t)?;
            let ast = parse_file(&t.io.input)?;
            let result = forward_transform(ast, &rules, &reg)?;
            log_trace(&t, &result.trace);
            write_dot(&t, &result.triple)?;
            emit(t.io.output.as_deref(), &triple_to_json(&result.triple))
        }
        Command::Backward(t) => {
            let (rules, reg) = rule_set(&t)?;
            let flow = load_graph(&t.io.input, Side::Target)?;
            let result = backward_transform(flow, &rules, &reg)?;
            log_trace(&t, &result.trace);
            write_dot(&t, &result.triple)?;
            emit(t.io.output.as_deref(), &triple_to_json(&result.triple))
        }
        Command::Roundtrip(t) => {
            let (rules, reg) = rule_set(&t)?;
            let ast = parse_file(&t.io.input)?;
            let fwd = forward_transform(ast, &rules, &reg)?;
            log_trace(&t, &fwd.trace);
            let back = backward_transform(fwd.triple.target, &rules, &reg)?;
            log_trace(&t, &back.trace);
            write_dot(&t, &back.triple)?;
            let text = unparse_program(&back.triple.source).map_err(|e| Failure::Stuck(e.to_string()))?;
            emit(t.io.output.as_deref(), &text)
        }
        Command::Check(t) => {
            let (rules, reg) = rule_set(&t)?;
            let triple = load_triple(&t.io.input)?;
            let report = check_consistency(&triple, &rules, &reg)?;
            log_trace(&t, &report.trace);
            write_dot(&t, &triple)?;
            if report.consistent {
                emit(t.io.output.as_deref(), "consistent\n")
            } else {
                let mut text = String::from("inconsistent\n");
                for u in report.unmarked() {
                    text.push_str(&format!("  unmatched {u}\n"));
                }
                emit(t.io.output.as_deref(), &text)?;
                Err(Failure::Stuck("triple is not consistent with the rule set".into()))
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_file(path: &Path) -> Result<Graph, Failure> {
    parse_program(&read(path)?).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

#[derive(Clone, Copy)]
enum Side {
    Source,
    Target,
}

/// A graph document, or one side of a triple document.
fn load_graph(path: &Path, side: Side) -> Result<Graph, Failure> {
    let text = read(path)?;
    let bad = |e: String| Failure::Input(format!("{}: {e}", path.display()));
    let is_triple = serde_json::from_str::<serde_json::Value>(&text)
        .map_err(|e| bad(e.to_string()))?
        .get("corr_metamodel")
        .is_some();
    let g = if is_triple {
        let t = triple_from_json(&text, &catalog()).map_err(|e| bad(e.to_string()))?;
        match side {
            Side::Source => t.source,
            Side::Target => t.target,
        }
    } else {
        graph_from_json(&text, &catalog()).map_err(|e| bad(e.to_string()))?
    };
    if let Some(d) = g.conforms().into_iter().next() {
        return Err(bad(d.to_string()));
    }
    Ok(g)
}

fn load_triple(path: &Path) -> Result<TripleModel, Failure> {
    let bad = |e: String| Failure::Input(format!("{}: {e}", path.display()));
    let t = triple_from_json(&read(path)?, &catalog()).map_err(|e| bad(e.to_string()))?;
    if let Some(d) = t.conforms().into_iter().next() {
        return Err(bad(d.to_string()));
    }
    Ok(t)
}

fn rule_set(t: &Transform) -> Result<(RuleSet, Registries), Failure> {
    let reg = registries();
    let (doc, origin) = match &t.rules {
        Some(p) => (read(p)?, p.display().to_string()),
        None => (RULES_JSON.to_string(), "built-in rules".to_string()),
    };
    let rules = load_rules(&doc, &reg).map_err(|e| Failure::Input(format!("{origin}: {e}")))?;
    Ok((rules, reg))
}

fn tracing(t: &Transform) -> bool {
    t.trace || std::env::var("TGG_TRACE").is_ok_and(|v| v == "1")
}

fn log_trace(t: &Transform, records: &[ApplicationRecord]) {
    if tracing(t) {
        for r in records {
            eprintln!("{r}");
        }
    }
}

fn write_dot(t: &Transform, triple: &TripleModel) -> Result<(), Failure> {
    match &t.dot {
        Some(path) => write_atomic(path, &export_dot(triple, tracing(t))),
        None => Ok(()),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(format!("cannot write output: {e}")))
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::Input(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
