use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::apply::PostContext;
use super::Direction;
use crate::csp::ConstraintRegistry;
use crate::graph::{NodeId, TripleModel};

/// Maps a node of the binding's `from` domain to the node the binding points at.
pub type Resolver = Arc<dyn Fn(&TripleModel, NodeId) -> Option<NodeId> + Send + Sync>;

/// Runs after a rule application; may only write attributes of nodes that
/// application created (or, when checking, translated).
pub type PostProcessor = Arc<dyn Fn(&mut PostContext<'_>, Direction) -> Result<(), String> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("resolver `{0}` is already registered")]
    DuplicateResolver(String),
    #[error("post-processor `{0}` is already registered")]
    DuplicatePostProcessor(String),
}

/// Host-code plugins referenced by rules by name.
#[derive(Clone)]
pub struct Registries {
    pub constraints: ConstraintRegistry,
    resolvers: BTreeMap<String, Resolver>,
    post_processors: BTreeMap<String, PostProcessor>,
}

impl Default for Registries {
    fn default() -> Self {
        Self::new(ConstraintRegistry::with_builtins())
    }
}

impl fmt::Debug for Registries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registries")
            .field("constraints", &self.constraints.names().collect::<Vec<_>>())
            .field("resolvers", &self.resolvers.keys().collect::<Vec<_>>())
            .field("post_processors", &self.post_processors.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Registries {
    pub fn new(constraints: ConstraintRegistry) -> Self {
        Self {
            constraints,
            resolvers: BTreeMap::new(),
            post_processors: BTreeMap::new(),
        }
    }

    pub fn register_resolver<F>(&mut self, name: &str, resolver: F) -> Result<(), RegistryError>
    where
        F: Fn(&TripleModel, NodeId) -> Option<NodeId> + Send + Sync + 'static,
    {
        if self.resolvers.contains_key(name) {
            return Err(RegistryError::DuplicateResolver(name.to_string()));
        }
        self.resolvers.insert(name.to_string(), Arc::new(resolver));
        Ok(())
    }

    pub fn register_post_processor<F>(&mut self, name: &str, hook: F) -> Result<(), RegistryError>
    where
        F: Fn(&mut PostContext<'_>, Direction) -> Result<(), String> + Send + Sync + 'static,
    {
        if self.post_processors.contains_key(name) {
            return Err(RegistryError::DuplicatePostProcessor(name.to_string()));
        }
        self.post_processors.insert(name.to_string(), Arc::new(hook));
        Ok(())
    }

    pub fn resolver(&self, name: &str) -> Option<&Resolver> {
        self.resolvers.get(name)
    }

    pub fn post_processor(&self, name: &str) -> Option<&PostProcessor> {
        self.post_processors.get(name)
    }
}
