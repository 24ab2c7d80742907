//! Generic minimal rigidity of bar-joint frameworks whose joints are confined
//! to parallel planes, concentric spheres or concentric cylinders.
//!
//! Two independent routes are provided: combinatorial (sparsity counts,
//! Henneberg derivations, spanning-tree decompositions) and numerical (exact
//! and floating-point ranks of the relative rigidity matrix, flex tracing).

pub mod enumerate;
pub mod flexes;
pub mod graph;
pub mod graph6;
pub mod iso;
pub mod linalg;
pub mod moves;
pub mod rigidity;
pub mod sparsity;
pub mod surfaces;
pub mod trees;
pub mod verify;

pub use graph::{cone, contract, edge, Edge, Graph, GraphError, SubgraphRef};
