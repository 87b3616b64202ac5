//! Symmetry reduction and time-ordered diagrams.
//!
//! An operator U commuting with A and B splits every resolvent entry along its
//! eigenspaces. In the multi-particle setting U is total momentum: B conserves it,
//! so the scattering series only ever visits states of one momentum block. Paths
//! i → k₁ → ⋯ → j through that block are grouped by the diagram they draw, and tree
//! diagrams admit at most one momentum assignment for given external lines.

mod diagram;
mod model;
mod state;
mod symmetry;
mod three_particle;
mod tree;

pub use diagram::{
    diagram_of, diagram_value, diagram_values, enumerate_paths, group_terms_by_diagram, Diagram, DiagramTerm,
    Endpoint, Line,
};
pub use model::{Model, SparseInteraction, Species, Vertex};
pub use state::{Momentum, MultisetState, Particle};
pub use symmetry::{block_decompose, commute_check, restricted_inverse, EigenspaceBlock, CLUSTER_TOL};
pub use three_particle::{three_particle_demo, TableRow, ThreeParticleReport, ThreeParticleSetup};
pub use tree::{connected_component_conservation, tree_solve};
