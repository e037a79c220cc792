//! Operational rules, pattern matching, rule application and the
//! forward / backward / check control algorithms.

mod apply;
mod control;
mod marks;
mod matcher;
mod operational;
mod registry;

use std::fmt;

pub use apply::{apply_rule, ApplicationRecord, ApplyError, PostContext};
pub use control::{
    backward_transform, check_consistency, forward_transform, transform, CheckReport, TransformError,
    TransformOptions, Transformation,
};
pub use marks::Marks;
pub use matcher::{find_matches, find_matches_at, Match};
pub use operational::{operationalize, ElementRole, OperationalError, OperationalRule};
pub use registry::{PostProcessor, Registries, RegistryError, Resolver};

use crate::rules::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
    Check,
}

impl Direction {
    pub fn is_input(self, domain: Domain) -> bool {
        match self {
            Direction::Forward => domain == Domain::Source,
            Direction::Backward => domain == Domain::Target,
            Direction::Check => true,
        }
    }

    /// Domain whose nodes anchor matches and drive the worklist.
    pub fn anchor_domain(self) -> Domain {
        match self {
            Direction::Backward => Domain::Target,
            _ => Domain::Source,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Check => "check",
        })
    }
}
