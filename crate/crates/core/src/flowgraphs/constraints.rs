//! Constraints the flowgraph rules use beyond the library set.

use crate::csp::builtins::is_identifier;
use crate::csp::{ConstraintDef, ConstraintRegistry, RegistryError};
use crate::graph::Value;

/// Identifier or integer literal.
pub fn is_atom_text(s: &str) -> bool {
    is_identifier(s) || (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
}

pub fn is_atom() -> ConstraintDef {
    ConstraintDef::new("isAtom", 1, &["B"], |_, args| match &args[0] {
        Some(Value::Str(s)) if is_atom_text(s) => Some(vec![Value::from(s.as_str())]),
        _ => None,
    })
}

/// `addPrefix(prefix, base, whole)`: `whole = prefix + base`.
pub fn add_prefix() -> ConstraintDef {
    ConstraintDef::new("addPrefix", 3, &["BBF", "BFB", "BBB"], |ad, args| {
        let s = |i: usize| match &args[i] {
            Some(Value::Str(s)) => Some(s.as_str()),
            _ => None,
        };
        let done = |p: &str, b: &str, w: &str| Some(vec![Value::from(p), Value::from(b), Value::from(w)]);
        match ad.to_string().as_str() {
            "BBF" => done(s(0)?, s(1)?, &format!("{}{}", s(0)?, s(1)?)),
            "BFB" => done(s(0)?, s(2)?.strip_prefix(s(0)?)?, s(2)?),
            "BBB" if format!("{}{}", s(0)?, s(1)?) == s(2)? => done(s(0)?, s(1)?, s(2)?),
            _ => None,
        }
    })
}

pub fn register(registry: &mut ConstraintRegistry) -> Result<(), RegistryError> {
    registry.register(is_atom())?;
    registry.register(add_prefix())
}
