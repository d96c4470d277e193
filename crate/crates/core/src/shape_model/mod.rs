//! Triangulated shape models: validation, edge topology and the
//! position-independent dyads consumed by the gravity engine.
//!
//! The pipeline is strictly one-way and every product is immutable:
//!
//! ```text
//! TriangleMesh --build_topology--> PolyhedronTopology --build_dyads--> DyadCache
//! ```

mod dyads;
mod mesh;
pub mod primitives;
mod topology;

pub use dyads::{build_dyads, DyadCache};
pub use mesh::{ManifoldReport, TriangleMesh};
pub use topology::{build_topology, Edge, PolyhedronTopology};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("mesh has no faces")]
    Empty,
    #[error("face {face} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats a vertex index: {indices:?}")]
    RepeatedVertex { face: usize, indices: [usize; 3] },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
    #[error("open mesh: edge ({a}, {b}) is shared by {count} faces, expected 2")]
    OpenEdge { a: usize, b: usize, count: usize },
    #[error("inconsistent winding: edge ({a}, {b}) has the same direction in faces {face_a} and {face_b}")]
    InconsistentWinding {
        a: usize,
        b: usize,
        face_a: usize,
        face_b: usize,
    },
    #[error("face {face} has zero area ({area:e} m^2)")]
    DegenerateFace { face: usize, area: f64 },
}
