use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::Vector3;

use super::{ManifoldReport, MeshError, TriangleMesh};

/// An undirected edge and the two faces that meet on it.
///
/// `vertices = [i, j]` with `i < j`. Face `faces[0]` (A) traverses the edge
/// as `i -> j`, face `faces[1]` (B) as `j -> i`. `slots[k]` is the local
/// edge index inside face `faces[k]`: slot `s` runs from corner `s` to
/// corner `(s + 1) % 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub faces: [usize; 2],
    pub slots: [usize; 2],
}

/// Edge adjacency plus unit face and edge normals of a closed mesh.
#[derive(Debug, Clone)]
pub struct PolyhedronTopology {
    mesh: TriangleMesh,
    edges: Vec<Edge>,
    face_normals: Vec<Vector3<f64>>,
    edge_normals: Vec<[Vector3<f64>; 3]>,
    report: ManifoldReport,
}

impl PolyhedronTopology {
    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    /// Unique edges, sorted by vertex pair.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn face_normal(&self, face: usize) -> &Vector3<f64> {
        &self.face_normals[face]
    }

    pub fn face_normals(&self) -> &[Vector3<f64>] {
        &self.face_normals
    }

    /// Outward unit normal of edge `slot` of `face`, lying in the face plane.
    pub fn edge_normal(&self, face: usize, slot: usize) -> &Vector3<f64> {
        &self.edge_normals[face][slot]
    }

    pub fn report(&self) -> &ManifoldReport {
        &self.report
    }
}

struct HalfEdge {
    face: usize,
    slot: usize,
    forward: bool,
}

/// Pair up half-edges. Fails on open, non-manifold or inconsistently wound meshes.
pub(crate) fn collect_edges(mesh: &TriangleMesh) -> Result<Vec<Edge>, MeshError> {
    let mut half_edges: BTreeMap<(usize, usize), Vec<HalfEdge>> = BTreeMap::new();
    for (face, idx) in mesh.faces().iter().enumerate() {
        for slot in 0..3 {
            let (from, to) = (idx[slot], idx[(slot + 1) % 3]);
            half_edges
                .entry((from.min(to), from.max(to)))
                .or_default()
                .push(HalfEdge {
                    face,
                    slot,
                    forward: from < to,
                });
        }
    }

    let mut edges = Vec::with_capacity(half_edges.len());
    for ((a, b), halves) in half_edges {
        if halves.len() != 2 {
            return Err(MeshError::OpenEdge {
                a,
                b,
                count: halves.len(),
            });
        }
        let (first, second) = (&halves[0], &halves[1]);
        if first.forward == second.forward {
            return Err(MeshError::InconsistentWinding {
                a,
                b,
                face_a: first.face,
                face_b: second.face,
            });
        }
        let (fa, fb) = if first.forward {
            (first, second)
        } else {
            (second, first)
        };
        edges.push(Edge {
            vertices: [a, b],
            faces: [fa.face, fb.face],
            slots: [fa.slot, fb.slot],
        });
    }
    Ok(edges)
}

/// Build edge adjacency and unit normals for a closed, outward-wound mesh.
///
/// Face normals are `(v2 - v1) x (v3 - v2)` and edge normals
/// `(v_{i+1} - v_i) x n_f`, both normalized. A face whose area falls below
/// `1e-12 * diagonal^2` is rejected.
pub fn build_topology(mesh: &TriangleMesh) -> Result<PolyhedronTopology, MeshError> {
    let edges = collect_edges(mesh)?;
    let diagonal = mesh.bounding_diagonal();
    let min_area = 1e-12 * diagonal * diagonal;

    let mut face_normals = Vec::with_capacity(mesh.faces().len());
    let mut edge_normals = Vec::with_capacity(mesh.faces().len());
    for face in 0..mesh.faces().len() {
        let v = mesh.face_vertices(face);
        let cross = (v[1] - v[0]).cross(&(v[2] - v[1]));
        let area = cross.norm() / 2.0;
        if !(area >= min_area) || area == 0.0 {
            return Err(MeshError::DegenerateFace { face, area });
        }
        let normal = cross / (2.0 * area);
        let slots = [0, 1, 2].map(|s| (v[(s + 1) % 3] - v[s]).cross(&normal).normalize());
        face_normals.push(normal);
        edge_normals.push(slots);
    }

    let report = ManifoldReport {
        vertices: mesh.vertices().len(),
        edges: edges.len(),
        faces: mesh.faces().len(),
        euler_characteristic: mesh.vertices().len() as i64 - edges.len() as i64
            + mesh.faces().len() as i64,
    };

    Ok(PolyhedronTopology {
        mesh: mesh.clone(),
        edges,
        face_normals,
        edge_normals,
        report,
    })
}
