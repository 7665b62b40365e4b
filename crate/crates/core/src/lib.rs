//! Graph reduction for causal DAGs with a point treatment.
//!
//! Given a DAG with treatment `A` and outcome `Y`, the crate classifies
//! vertices, decides which of them carry no information about the
//! interventional mean `E Y(a)`, projects those out and emits the g-formula
//! of the reduced graph. A small discrete Bayesian network engine evaluates
//! the functionals, the efficient influence function and plugin estimators
//! exactly, which is what the test suite uses to check the graph results.

pub mod bn;
pub mod criteria;
pub mod equivalence;
pub mod error;
pub mod formula;
pub mod functionals;
pub mod golden;
pub mod graph;
pub mod reduction;
pub mod rng;
pub mod sim;
pub mod taxonomy;

pub use error::{Error, Result};
pub use graph::{parse_graph, Dag, VertexSet};
