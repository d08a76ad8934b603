//! Spectral graph toolkit for bottleneck analysis of resource networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds the dense [`WeightedGraph`] representation, random DAG
//!   generation, the line-oriented graph file format and DOT export.
//! * [`spectral`] builds Laplacians, eigendecompositions, the Laplacian
//!   pseudoinverse and effective resistances.
//! * [`cuts`] computes Cheeger constants (exhaustive and Fiedler sweep).
//! * [`rewire`] implements the Fiedler-gradient soft adjacency step and the
//!   Cheeger/resistance edge-swap optimizer.
//! * [`sync`] covers the Kuramoto stability condition, desynchronization
//!   detection, stabilizer insertion and a fixed-step simulator.

pub mod cuts;
pub mod error;
pub mod fmt;
pub mod graph;
pub mod rewire;
pub mod spectral;
pub mod sync;

pub use error::{Error, Result};
pub use graph::{EdgeList, WeightedGraph};
pub use spectral::{ResistanceMatrix, SpectralDecomposition};
