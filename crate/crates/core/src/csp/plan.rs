use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::adornment::{Adornment, Slot};
use super::registry::{ConstraintDef, ConstraintRegistry};
use crate::graph::Value;

/// Variable name to value.
pub type Bindings = BTreeMap<String, Value>;

/// A constraint argument: a rule variable or a literal.
///
/// Serialized as `"$name"` for variables, any other string or number for
/// literals. A literal string that starts with `$` is written with `$$`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Lit(Value),
}

impl Arg {
    pub fn var(name: &str) -> Self {
        Arg::Var(name.to_string())
    }

    pub fn lit(v: impl Into<Value>) -> Self {
        Arg::Lit(v.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Arg::Var(v) => Some(v),
            Arg::Lit(_) => None,
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) => write!(f, "${v}"),
            Arg::Lit(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Arg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Arg::Var(v) => s.collect_str(&format_args!("${v}")),
            Arg::Lit(Value::Str(v)) if v.starts_with('$') => s.collect_str(&format_args!("${v}")),
            Arg::Lit(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Arg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Value::deserialize(d)? {
            Value::Str(s) => match s.strip_prefix('$') {
                Some(rest) if rest.starts_with('$') => Arg::Lit(Value::Str(rest.to_string())),
                Some(rest) if !rest.is_empty() => Arg::Var(rest.to_string()),
                Some(_) => return Err(serde::de::Error::custom("empty variable name `$`")),
                None => Arg::Lit(Value::Str(s)),
            },
            v => Arg::Lit(v),
        })
    }
}

/// A constraint applied to rule variables and literals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintInstance {
    pub constraint: String,
    pub args: Vec<Arg>,
}

impl ConstraintInstance {
    pub fn new(constraint: &str, args: Vec<Arg>) -> Self {
        ConstraintInstance {
            constraint: constraint.to_string(),
            args,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Arg::as_var)
    }
}

impl fmt::Display for ConstraintInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.constraint)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone)]
pub struct PlanStep {
    pub instance: ConstraintInstance,
    pub adornment: Adornment,
    def: Arc<ConstraintDef>,
}

impl PartialEq for PlanStep {
    fn eq(&self, other: &Self) -> bool {
        self.instance == other.instance && self.adornment == other.adornment
    }
}

/// Constraints in solving order, each with the adornment it runs under.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CspPlan {
    pub steps: Vec<PlanStep>,
    pub initially_bound: BTreeSet<String>,
}

impl CspPlan {
    /// `(constraint name, adornment)` per step, for comparisons in tests and logs.
    pub fn signature(&self) -> Vec<(String, String)> {
        self.steps
            .iter()
            .map(|s| (s.instance.constraint.clone(), s.adornment.to_string()))
            .collect()
    }

    /// Every variable bound once the plan has run.
    pub fn bound_after(&self) -> BTreeSet<String> {
        let mut out = self.initially_bound.clone();
        for s in &self.steps {
            out.extend(s.instance.variables().map(str::to_string));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unknown constraint `{0}`")]
    UnknownConstraint(String),
    #[error("`{instance}` has {found} arguments, `{constraint}` takes {expected}")]
    ArityMismatch {
        instance: String,
        constraint: String,
        expected: usize,
        found: usize,
    },
    #[error("CSP unsolvable: no allowed adornment for {}; unbound variables {:?}", .stuck.join(", "), .unbound)]
    Unsolvable {
        stuck: Vec<String>,
        unbound: BTreeSet<String>,
    },
}

/// Order `instances` so each runs under an allowed adornment given what earlier
/// steps bound. Greedy: at every step the first eligible instance in declaration
/// order is taken. No backtracking.
pub fn sort_csp(
    instances: &[ConstraintInstance],
    initially_bound: &BTreeSet<String>,
    registry: &ConstraintRegistry,
) -> Result<CspPlan, SortError> {
    let mut defs = Vec::with_capacity(instances.len());
    for inst in instances {
        let def = registry
            .get(&inst.constraint)
            .ok_or_else(|| SortError::UnknownConstraint(inst.constraint.clone()))?;
        if def.arity() != inst.args.len() {
            return Err(SortError::ArityMismatch {
                instance: inst.to_string(),
                constraint: inst.constraint.clone(),
                expected: def.arity(),
                found: inst.args.len(),
            });
        }
        defs.push(def.clone());
    }
    let mut bound = initially_bound.clone();
    let mut remaining: Vec<usize> = (0..instances.len()).collect();
    let mut steps = Vec::with_capacity(instances.len());
    while !remaining.is_empty() {
        let pick = remaining.iter().enumerate().find_map(|(pos, &i)| {
            let pattern = pattern_of(&instances[i], &bound);
            defs[i].allows(&pattern).then_some((pos, i, pattern))
        });
        let Some((pos, i, pattern)) = pick else {
            let stuck = remaining.iter().map(|&i| instances[i].to_string()).collect();
            let unbound = remaining
                .iter()
                .flat_map(|&i| instances[i].variables())
                .filter(|v| !bound.contains(*v))
                .map(str::to_string)
                .collect();
            return Err(SortError::Unsolvable { stuck, unbound });
        };
        remaining.remove(pos);
        bound.extend(instances[i].variables().map(str::to_string));
        steps.push(PlanStep {
            instance: instances[i].clone(),
            adornment: pattern,
            def: defs[i].clone(),
        });
    }
    Ok(CspPlan {
        steps,
        initially_bound: initially_bound.clone(),
    })
}

fn pattern_of(inst: &ConstraintInstance, bound: &BTreeSet<String>) -> Adornment {
    // A variable repeated within one instance is bound from its first free slot on.
    let mut seen = BTreeSet::new();
    Adornment::new(
        inst.args
            .iter()
            .map(|a| match a {
                Arg::Lit(_) => Slot::Bound,
                Arg::Var(v) if bound.contains(v) || !seen.insert(v.as_str()) => Slot::Bound,
                Arg::Var(_) => Slot::Free,
            })
            .collect(),
    )
}

/// One executed plan step, with the argument values after it ran.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedStep {
    pub constraint: String,
    pub adornment: Adornment,
    pub values: Vec<Value>,
}

impl fmt::Display for SolvedStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}](", self.constraint, self.adornment)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub bindings: Bindings,
    pub trace: Vec<SolvedStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CspFailure {
    #[error("variable `{0}` expected bound before solving")]
    MissingBinding(String),
    #[error("constraint {instance} failed under {adornment} with arguments [{}]", fmt_args(.args))]
    ConstraintFailed {
        step: usize,
        instance: String,
        adornment: String,
        args: Vec<Option<Value>>,
    },
}

fn fmt_args(args: &[Option<Value>]) -> String {
    args.iter()
        .map(|a| a.as_ref().map_or_else(|| "_".to_string(), ToString::to_string))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Run `plan` from `bindings`. Every step's output is re-verified with the
/// constraint's all-bound check before it is accepted.
pub fn solve_csp(plan: &CspPlan, bindings: &Bindings) -> Result<Solution, CspFailure> {
    for v in &plan.initially_bound {
        if !bindings.contains_key(v) {
            return Err(CspFailure::MissingBinding(v.clone()));
        }
    }
    let mut env: Bindings = bindings.clone();
    let mut trace = Vec::with_capacity(plan.steps.len());
    for (idx, step) in plan.steps.iter().enumerate() {
        let args: Vec<Option<Value>> = step
            .instance
            .args
            .iter()
            .enumerate()
            .map(|(i, a)| match a {
                Arg::Lit(v) => Some(v.clone()),
                Arg::Var(_) if step.adornment.is_free(i) => None,
                Arg::Var(v) => env.get(v).cloned(),
            })
            .collect();
        let fail = || CspFailure::ConstraintFailed {
            step: idx,
            instance: step.instance.to_string(),
            adornment: step.adornment.to_string(),
            args: args.clone(),
        };
        let values = step.def.eval(&step.adornment, &args).ok_or_else(fail)?;
        if !step.def.check(&values) {
            return Err(fail());
        }
        for (a, v) in step.instance.args.iter().zip(&values) {
            if let Arg::Var(name) = a {
                match env.get(name) {
                    Some(existing) if existing != v => return Err(fail()),
                    Some(_) => {}
                    None => {
                        env.insert(name.clone(), v.clone());
                    }
                }
            }
        }
        trace.push(SolvedStep {
            constraint: step.instance.constraint.clone(),
            adornment: step.adornment.clone(),
            values,
        });
    }
    Ok(Solution { bindings: env, trace })
}
