use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use super::apply::{apply_rule, ApplicationRecord, ApplyError};
use super::marks::Marks;
use super::matcher::{matches_at, Match};
use super::operational::{operationalize, OperationalError, OperationalRule};
use super::registry::Registries;
use super::Direction;
use crate::graph::{Graph, NodeId, TripleModel};
use crate::rules::{Domain, RuleSet};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformOptions {
    /// Pick uniformly among all eligible (anchor, rule) pairs instead of the
    /// first in document and declaration order.
    pub shuffle_seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Transformation {
    pub triple: TripleModel,
    pub marks: Marks,
    pub trace: Vec<ApplicationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("input graph uses metamodel `{found}`, rule set expects `{expected}`")]
    WrongMetamodel { expected: String, found: String },
    #[error(transparent)]
    Operational(#[from] OperationalError),
    #[error("rule `{rule}` produced an invalid model: {source}")]
    Apply {
        rule: String,
        #[source]
        source: ApplyError,
    },
    #[error("{direction} transformation stuck after {applied} rule applications; untranslated: {}", .untranslated.join(", "))]
    Stuck {
        direction: Direction,
        applied: usize,
        untranslated: Vec<String>,
    },
}

/// Verdict of [`check_consistency`] with the elements no rule application covered.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub consistent: bool,
    pub unmarked_source: Vec<String>,
    pub unmarked_target: Vec<String>,
    pub unmarked_corrs: Vec<String>,
    pub trace: Vec<ApplicationRecord>,
}

impl CheckReport {
    pub fn unmarked(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.unmarked_source.iter().map(|s| format!("source {s}")));
        out.extend(self.unmarked_target.iter().map(|s| format!("target {s}")));
        out.extend(self.unmarked_corrs.iter().map(|s| format!("corr {s}")));
        out
    }
}

fn expect_metamodel(g: &Graph, expected: &Graph) -> Result<(), TransformError> {
    if g.metamodel().name() != expected.metamodel().name() {
        return Err(TransformError::WrongMetamodel {
            expected: expected.metamodel().name().to_string(),
            found: g.metamodel().name().to_string(),
        });
    }
    Ok(())
}

fn empty_triple(ruleset: &RuleSet) -> TripleModel {
    TripleModel::new(
        Graph::new(ruleset.schema.source.clone()),
        Graph::new(ruleset.schema.target.clone()),
        ruleset.schema.corr.clone(),
    )
}

pub fn forward_transform(
    source: Graph,
    ruleset: &RuleSet,
    registries: &Registries,
) -> Result<Transformation, TransformError> {
    let mut triple = empty_triple(ruleset);
    expect_metamodel(&source, &triple.source)?;
    triple.source = source;
    transform(Direction::Forward, triple, ruleset, registries, &TransformOptions::default())
}

pub fn backward_transform(
    target: Graph,
    ruleset: &RuleSet,
    registries: &Registries,
) -> Result<Transformation, TransformError> {
    let mut triple = empty_triple(ruleset);
    expect_metamodel(&target, &triple.target)?;
    triple.target = target;
    transform(Direction::Backward, triple, ruleset, registries, &TransformOptions::default())
}

/// Replay the rule set over an existing triple, marking instead of creating.
pub fn check_consistency(
    triple: &TripleModel,
    ruleset: &RuleSet,
    registries: &Registries,
) -> Result<CheckReport, TransformError> {
    let reference = empty_triple(ruleset);
    expect_metamodel(&triple.source, &reference.source)?;
    expect_metamodel(&triple.target, &reference.target)?;
    let ops = compile(ruleset, Direction::Check, registries)?;
    let (_, marks, trace) = run(&ops, triple.clone(), registries, &TransformOptions::default())?;
    let report = CheckReport {
        unmarked_source: marks.unmarked(triple, Domain::Source),
        unmarked_target: marks.unmarked(triple, Domain::Target),
        unmarked_corrs: marks.unmarked(triple, Domain::Corr),
        consistent: false,
        trace,
    };
    Ok(CheckReport {
        consistent: report.unmarked().is_empty(),
        ..report
    })
}

fn compile(ruleset: &RuleSet, direction: Direction, registries: &Registries) -> Result<Vec<OperationalRule>, TransformError> {
    ruleset
        .rules
        .iter()
        .map(|r| operationalize(r, direction, registries).map_err(TransformError::from))
        .collect()
}

/// Forward or backward transformation of `triple`, whose input domain is filled
/// and whose output domain and corr links are empty.
pub fn transform(
    direction: Direction,
    triple: TripleModel,
    ruleset: &RuleSet,
    registries: &Registries,
    options: &TransformOptions,
) -> Result<Transformation, TransformError> {
    let ops = compile(ruleset, direction, registries)?;
    let (triple, marks, trace) = run(&ops, triple, registries, options)?;
    let domain = direction.anchor_domain();
    let untranslated: Vec<String> = describe_unmarked(&triple, &marks, domain);
    if !untranslated.is_empty() {
        return Err(TransformError::Stuck {
            direction,
            applied: trace.len(),
            untranslated,
        });
    }
    Ok(Transformation { triple, marks, trace })
}

fn describe_unmarked(triple: &TripleModel, marks: &Marks, domain: Domain) -> Vec<String> {
    let g = if domain == Domain::Source { &triple.source } else { &triple.target };
    let nodes = g
        .containment_preorder()
        .into_iter()
        .filter(|n| !marks.node_marked(domain, *n))
        .map(|n| format!("{n} ({})", g.node_type(n).unwrap_or("?")));
    let edges = g
        .edges()
        .filter(|e| !marks.edge_marked(domain, e.id))
        .map(|e| format!("{} ({} {}->{})", e.id, e.ty, e.source, e.target));
    nodes.chain(edges).collect()
}

/// The worklist: scan unmarked anchor-domain nodes in containment preorder,
/// apply the first rule that matches, and rescan until nothing applies.
fn run(
    ops: &[OperationalRule],
    mut triple: TripleModel,
    registries: &Registries,
    options: &TransformOptions,
) -> Result<(TripleModel, Marks, Vec<ApplicationRecord>), TransformError> {
    let direction = ops.first().map_or(Direction::Forward, |o| o.direction);
    let domain = direction.anchor_domain();
    let mut marks = Marks::new();
    let mut trace = Vec::new();
    let mut axiom_applied = false;
    let mut rng = options.shuffle_seed.map(StdRng::seed_from_u64);
    loop {
        let g = if domain == Domain::Source { &triple.source } else { &triple.target };
        let anchors: Vec<NodeId> = g
            .containment_preorder()
            .into_iter()
            .filter(|n| !marks.node_marked(domain, *n))
            .collect();
        let eligible: Vec<&OperationalRule> = ops.iter().filter(|op| !(op.is_axiom() && axiom_applied)).collect();
        let mut applied = None;
        match rng.as_mut() {
            None => {
                'scan: for &anchor in &anchors {
                    for op in &eligible {
                        for m in matches_at(op, &triple, &marks, registries, anchor, usize::MAX) {
                            if let Some(record) = try_apply(op, &m, &mut triple, &mut marks, registries)? {
                                applied = Some((op.is_axiom(), record));
                                break 'scan;
                            }
                        }
                    }
                }
            }
            Some(rng) => {
                let mut candidates: Vec<(&OperationalRule, Match)> = Vec::new();
                for &anchor in &anchors {
                    for op in &eligible {
                        let found = matches_at(op, &triple, &marks, registries, anchor, usize::MAX);
                        candidates.extend(found.into_iter().map(|m| (*op, m)));
                    }
                }
                while !candidates.is_empty() {
                    let (op, m) = candidates.swap_remove(rng.gen_range(0..candidates.len()));
                    if let Some(record) = try_apply(op, &m, &mut triple, &mut marks, registries)? {
                        applied = Some((op.is_axiom(), record));
                        break;
                    }
                }
            }
        }
        let Some((is_axiom, record)) = applied else { break };
        axiom_applied |= is_axiom;
        trace.push(record);
    }
    Ok((triple, marks, trace))
}

/// `None` when the match turned out not to be applicable.
fn try_apply(
    op: &OperationalRule,
    m: &Match,
    triple: &mut TripleModel,
    marks: &mut Marks,
    registries: &Registries,
) -> Result<Option<ApplicationRecord>, TransformError> {
    match apply_rule(op, m, triple, marks, registries) {
        Ok(record) => Ok(Some(record)),
        Err(ApplyError::Post { .. } | ApplyError::Stale(_) | ApplyError::Csp(_)) => Ok(None),
        Err(source) => Err(TransformError::Apply {
            rule: op.name().to_string(),
            source,
        }),
    }
}
