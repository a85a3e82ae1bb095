//! Exact and approximate embeddings of unweighted graph metrics into
//! weighted subdivisions of a small pattern graph.
//!
//! The line is the pattern `K2` and the cycle is `K3`. Hosts are stored
//! compactly: one ordered list of subdivision points per pattern edge, with
//! exact rational offsets.

pub mod approx;
pub mod embedding;
pub mod error;
pub mod fpt;
pub mod graph;
pub mod harness;
pub mod host;
pub mod line;
pub mod lp;
pub mod pattern;
pub mod rational;

pub use embedding::{DistortionReport, Embedding};
pub use error::{Budget, Error, Result};
pub use graph::{Graph, VertexSet};
pub use host::{Host, Point};
pub use pattern::PatternGraph;
pub use rational::Rat;
