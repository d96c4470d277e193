use alloc::vec::Vec;

use nalgebra::Matrix3;

use super::PolyhedronTopology;

/// Position-independent face and edge dyads of a polyhedron.
///
/// Built once per shape model and shared read-only by every field
/// evaluation.
#[derive(Debug, Clone)]
pub struct DyadCache {
    topology: PolyhedronTopology,
    face_dyads: Vec<Matrix3<f64>>,
    edge_dyads: Vec<Matrix3<f64>>,
    edge_lengths: Vec<f64>,
}

impl DyadCache {
    pub fn topology(&self) -> &PolyhedronTopology {
        &self.topology
    }

    /// `F_f = n_f n_f^T`, indexed like the mesh faces.
    pub fn face_dyads(&self) -> &[Matrix3<f64>] {
        &self.face_dyads
    }

    /// `E_e = n_A (n^A_e)^T + n_B (n^B_e)^T`, indexed like
    /// [`PolyhedronTopology::edges`].
    pub fn edge_dyads(&self) -> &[Matrix3<f64>] {
        &self.edge_dyads
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }
}

pub fn build_dyads(topology: PolyhedronTopology) -> DyadCache {
    let face_dyads = topology
        .face_normals()
        .iter()
        .map(|n| n * n.transpose())
        .collect();

    let vertices = topology.mesh().vertices();
    let (edge_dyads, edge_lengths) = topology
        .edges()
        .iter()
        .map(|edge| {
            let [fa, fb] = edge.faces;
            let [sa, sb] = edge.slots;
            let dyad = topology.face_normal(fa) * topology.edge_normal(fa, sa).transpose()
                + topology.face_normal(fb) * topology.edge_normal(fb, sb).transpose();
            let [i, j] = edge.vertices;
            (dyad, (vertices[j] - vertices[i]).norm())
        })
        .unzip();

    DyadCache {
        topology,
        face_dyads,
        edge_dyads,
        edge_lengths,
    }
}
