//! Bidirectional attribute constraints: adornments, registry, sorting and solving.

mod adornment;
pub mod builtins;
mod plan;
mod registry;

pub use adornment::{ad, Adornment, Slot};
pub use plan::{
    solve_csp, sort_csp, Arg, Bindings, ConstraintInstance, CspFailure, CspPlan, PlanStep,
    Solution, SolvedStep, SortError,
};
pub use registry::{ConstraintDef, ConstraintRegistry, RegistryError, Semantics};
