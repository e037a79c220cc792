//! Helpers shared by the integration tests: corpus loading, a random program
//! generator and a control-flow oracle that walks the AST graph directly.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use tggflow::engine::Registries;
use tggflow::flowgraphs::build_flowgraphs_ruleset;
use tggflow::graph::{Graph, NodeId, TripleModel};
use tggflow::rules::RuleSet;

pub fn rules() -> (RuleSet, Registries) {
    build_flowgraphs_ruleset()
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// `(file name, text)` for every corpus program, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("corpus entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "mj"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).expect("corpus file"))
        })
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Random programs

pub struct GenConfig {
    pub max_statements: usize,
    pub max_depth: usize,
}

const NAMES: &[&str] = &["a", "b", "c", "i", "n", "x", "y", "sum"];
const OPS: &[&str] = &["+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!=", "&&", "||"];

fn atom(rng: &mut StdRng) -> String {
    if rng.gen_bool(0.6) {
        NAMES.choose(rng).unwrap().to_string()
    } else {
        rng.gen_range(0..100).to_string()
    }
}

fn expr(rng: &mut StdRng) -> String {
    match rng.gen_range(0..4) {
        0 => atom(rng),
        1 | 2 => format!("{} {} {}", atom(rng), OPS.choose(rng).unwrap(), atom(rng)),
        _ => format!(
            "{} {} {} {} {}",
            atom(rng),
            OPS.choose(rng).unwrap(),
            atom(rng),
            OPS.choose(rng).unwrap(),
            atom(rng)
        ),
    }
}

struct Gen<'a> {
    rng: &'a mut StdRng,
    budget: usize,
    max_depth: usize,
}

impl Gen<'_> {
    fn block(&mut self, depth: usize, in_loop: bool, indent: usize, out: &mut String) {
        let len = self.rng.gen_range(0..=3);
        for _ in 0..len {
            if self.budget == 0 {
                return;
            }
            self.budget -= 1;
            self.statement(depth, in_loop, indent, out);
        }
    }

    fn statement(&mut self, depth: usize, in_loop: bool, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        let nest = depth < self.max_depth;
        let kind = self.rng.gen_range(0..10);
        let name = NAMES.choose(self.rng).unwrap();
        match kind {
            0..=2 => out.push_str(&format!("{pad}{name} = {};\n", expr(self.rng))),
            3 => out.push_str(&format!("{pad}int {name} = {};\n", expr(self.rng))),
            4 | 5 if nest => {
                out.push_str(&format!("{pad}if ({}) {{\n", expr(self.rng)));
                self.block(depth + 1, in_loop, indent + 1, out);
                if self.rng.gen_bool(0.5) {
                    out.push_str(&format!("{pad}}} else {{\n"));
                    self.block(depth + 1, in_loop, indent + 1, out);
                }
                out.push_str(&format!("{pad}}}\n"));
            }
            6 | 7 if nest => {
                out.push_str(&format!("{pad}while ({}) {{\n", expr(self.rng)));
                self.block(depth + 1, true, indent + 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
            8 if in_loop => out.push_str(&format!("{pad}break;\n")),
            9 => out.push_str(&format!("{pad}return;\n")),
            _ => out.push_str(&format!("{pad}{name} = {};\n", atom(self.rng))),
        }
    }
}

/// A single-method program with at most `max_statements` statements and
/// nesting at most `max_depth`. `break` only appears inside a loop.
pub fn random_program(rng: &mut StdRng, config: &GenConfig) -> String {
    let mut body = String::new();
    let mut g = Gen {
        rng,
        budget: config.max_statements,
        max_depth: config.max_depth,
    };
    let len = g.rng.gen_range(1..=config.max_statements.max(1));
    for _ in 0..len {
        if g.budget == 0 {
            break;
        }
        g.budget -= 1;
        g.statement(0, false, 1, &mut body);
    }
    format!("void m() {{\n{body}}}\n")
}

// ---------------------------------------------------------------------------
// Control-flow oracle over the AST graph

/// Node label shared by the oracle and the flow-graph readout:
/// `method`, `exit`, or `s<index>` for a statement.
pub type Label = String;

fn child_edges(ast: &Graph, node: NodeId) -> Vec<NodeId> {
    ast.children(node, "child")
}

fn stmt_label(ast: &Graph, stmt: NodeId) -> Label {
    let index = ast.node(stmt).unwrap().attr("index").and_then(|v| v.as_int()).unwrap();
    format!("s{index}")
}

fn ty(ast: &Graph, node: NodeId) -> &str {
    ast.node_type(node).unwrap()
}

fn blocks(ast: &Graph, stmt: NodeId) -> Vec<NodeId> {
    child_edges(ast, stmt)
        .into_iter()
        .filter(|c| ty(ast, *c) == "Block")
        .collect()
}

#[derive(Default)]
pub struct OracleCfg {
    /// Each statement's stored successor.
    pub next: BTreeSet<(Label, Label)>,
    /// All control-flow edges: entry, branches, loop back edges, successors.
    pub full: BTreeSet<(Label, Label)>,
}

struct Oracle<'a> {
    ast: &'a Graph,
    out: OracleCfg,
}

impl Oracle<'_> {
    fn first(&self, block: NodeId) -> Option<Label> {
        child_edges(self.ast, block).first().map(|s| stmt_label(self.ast, *s))
    }

    fn walk(&mut self, block: NodeId, cont: &Label, brk: Option<&Label>) {
        let stmts = child_edges(self.ast, block);
        for (i, &s) in stmts.iter().enumerate() {
            let me = stmt_label(self.ast, s);
            let follow = stmts
                .get(i + 1)
                .map(|n| stmt_label(self.ast, *n))
                .unwrap_or_else(|| cont.clone());
            let stored = match ty(self.ast, s) {
                "Return" => "exit".to_string(),
                "Break" => brk.expect("break inside a loop").clone(),
                _ => follow.clone(),
            };
            self.out.next.insert((me.clone(), stored.clone()));
            // An if only leaves through its branches.
            if ty(self.ast, s) != "If" {
                self.out.full.insert((me.clone(), stored));
            }
            match ty(self.ast, s) {
                "If" => {
                    for b in blocks(self.ast, s) {
                        let entry = self.first(b).unwrap_or_else(|| follow.clone());
                        self.out.full.insert((me.clone(), entry));
                        self.walk(b, &follow, brk);
                    }
                }
                "While" => {
                    let body = blocks(self.ast, s)[0];
                    let entry = self.first(body).unwrap_or_else(|| me.clone());
                    self.out.full.insert((me.clone(), entry));
                    self.walk(body, &me, Some(&follow));
                }
                _ => {}
            }
        }
    }
}

/// Control flow of a single-method AST.
pub fn oracle_cfg(ast: &Graph) -> OracleCfg {
    let program = ast.nodes().find(|n| n.ty == "Program").unwrap().id;
    let method = child_edges(ast, program)[0];
    let body = blocks(ast, method)[0];
    let mut o = Oracle {
        ast,
        out: OracleCfg::default(),
    };
    let entry = o.first(body).unwrap_or_else(|| "exit".to_string());
    o.out.full.insert(("method".to_string(), entry));
    o.walk(body, &"exit".to_string(), None);
    o.out
}

/// Label of every flow node, read through the correspondence links.
pub fn flow_labels(triple: &TripleModel) -> BTreeMap<NodeId, Label> {
    let mut out = BTreeMap::new();
    for n in triple.target.nodes() {
        let label = match n.ty.as_str() {
            "Method" => "method".to_string(),
            "Exit" => "exit".to_string(),
            "Seq" => continue,
            _ => {
                let corr = triple
                    .corrs_from_target(n.id)
                    .into_iter()
                    .find(|c| c.ty == "AstToFlow")
                    .expect("statement corr");
                stmt_label(&triple.source, corr.source)
            }
        };
        out.insert(n.id, label);
    }
    out
}

pub fn stored_cf_next(triple: &TripleModel) -> BTreeSet<(Label, Label)> {
    let labels = flow_labels(triple);
    triple
        .target
        .edges()
        .filter(|e| e.ty == "cfNext")
        .map(|e| (labels[&e.source].clone(), labels[&e.target].clone()))
        .collect()
}

pub fn full_cfg(triple: &TripleModel) -> BTreeSet<(Label, Label)> {
    let labels = flow_labels(triple);
    tggflow::flowgraphs::cfg::control_flow_edges(&triple.target)
        .into_iter()
        .map(|(a, b)| (labels[&a].clone(), labels[&b].clone()))
        .collect()
}
