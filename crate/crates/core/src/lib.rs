//! Triple graph grammar engine with attribute constraints, binding expressions
//! and post-processing hooks, together with the mini-Java ↔ flowgraph case.

pub mod cli;
pub mod csp;
pub mod dot;
pub mod engine;
pub mod flowgraphs;
pub mod graph;
pub mod minijava;
pub mod ops;
pub mod rules;
