//! Declarative TGG rules: representation, loading and static validation.

mod load;
mod model;
mod validate;

pub use load::{build_ruleset, load_ruleset, serialize_ruleset, LoadError};
pub use model::{
    assignment_var, BindingExpr, Domain, Modifier, RuleEdge, RuleElement, RuleSet, TggRule,
    TggSchema, Var,
};
pub use validate::validate_rule;
