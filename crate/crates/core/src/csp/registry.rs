use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::adornment::Adornment;
use crate::graph::Value;

/// Evaluates a constraint under one adornment. Receives every argument (free ones
/// as `None`) and returns the completed argument list, or `None` when the
/// constraint does not hold or cannot produce values.
pub type Semantics = Arc<dyn Fn(&Adornment, &[Option<Value>]) -> Option<Vec<Value>> + Send + Sync>;

/// A bidirectional attribute constraint.
#[derive(Clone)]
pub struct ConstraintDef {
    name: String,
    arity: usize,
    allowed: Vec<Adornment>,
    semantics: Semantics,
}

impl fmt::Debug for ConstraintDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let allowed: Vec<String> = self.allowed.iter().map(ToString::to_string).collect();
        f.debug_struct("ConstraintDef")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("allowed", &allowed)
            .finish()
    }
}

impl ConstraintDef {
    /// The all-bound check adornment is always added to `allowed`.
    pub fn new<F>(name: &str, arity: usize, allowed: &[&str], semantics: F) -> Self
    where
        F: Fn(&Adornment, &[Option<Value>]) -> Option<Vec<Value>> + Send + Sync + 'static,
    {
        let mut ads: Vec<Adornment> = allowed
            .iter()
            .map(|a| a.parse::<Adornment>().expect("valid adornment"))
            .collect();
        for a in &ads {
            assert_eq!(a.len(), arity, "adornment {a} of `{name}` does not match arity {arity}");
        }
        let check = Adornment::all_bound(arity);
        if !ads.contains(&check) {
            ads.push(check);
        }
        ConstraintDef {
            name: name.to_string(),
            arity,
            allowed: ads,
            semantics: Arc::new(semantics),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn allowed(&self) -> &[Adornment] {
        &self.allowed
    }

    pub fn allows(&self, adornment: &Adornment) -> bool {
        self.allowed.contains(adornment)
    }

    /// Evaluate under `adornment`. Bound slots must carry values.
    pub fn eval(&self, adornment: &Adornment, args: &[Option<Value>]) -> Option<Vec<Value>> {
        if args.len() != self.arity || !self.allows(adornment) {
            return None;
        }
        let out = (self.semantics)(adornment, args)?;
        // Bound inputs pass through unchanged.
        let consistent = out.len() == self.arity
            && args
                .iter()
                .zip(&out)
                .all(|(a, o)| a.as_ref().is_none_or(|a| a == o));
        consistent.then_some(out)
    }

    /// Pure check mode on fully bound arguments.
    pub fn check(&self, args: &[Value]) -> bool {
        let opts: Vec<Option<Value>> = args.iter().cloned().map(Some).collect();
        self.eval(&Adornment::all_bound(self.arity), &opts).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("constraint `{0}` is already registered")]
    Duplicate(String),
}

/// Named constraint definitions available to rule CSPs.
#[derive(Debug, Clone, Default)]
pub struct ConstraintRegistry {
    defs: BTreeMap<String, Arc<ConstraintDef>>,
}

impl ConstraintRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry preloaded with the library constraints.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        for def in super::builtins::all() {
            r.register(def).expect("builtin names are distinct");
        }
        r
    }

    pub fn register(&mut self, def: ConstraintDef) -> Result<(), RegistryError> {
        if self.defs.contains_key(def.name()) {
            return Err(RegistryError::Duplicate(def.name().to_string()));
        }
        self.defs.insert(def.name().to_string(), Arc::new(def));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Arc<ConstraintDef>> {
        self.defs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }
}
