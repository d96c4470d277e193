use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};

use super::topology::collect_edges;
use super::MeshError;

/// Vertices and counterclockwise (outward-normal) triangles in the
/// body-fixed frame, meters.
///
/// Construction checks the per-face invariants: three distinct in-range
/// indices and finite coordinates. Closedness and orientation are checked
/// by [`TriangleMesh::check_manifold`] and again by
/// [`build_topology`](super::build_topology).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<[usize; 3]>,
}

/// Counts gathered while validating a closed, consistently oriented mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManifoldReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
}

impl ManifoldReport {
    /// `V - E + F == 2`. Other values are legal but flag a body with holes.
    pub fn is_genus_zero(&self) -> bool {
        self.euler_characteristic == 2
    }
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(vertex) = vertices
            .iter()
            .position(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()))
        {
            return Err(MeshError::NonFiniteVertex { vertex });
        }
        for (face, idx) in faces.iter().enumerate() {
            for &index in idx {
                if index >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        face,
                        index,
                        vertex_count: vertices.len(),
                    });
                }
            }
            if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
                return Err(MeshError::RepeatedVertex {
                    face,
                    indices: *idx,
                });
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_vertices(&self, face: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Verify the mesh is closed and consistently wound.
    pub fn check_manifold(&self) -> Result<ManifoldReport, MeshError> {
        let edges = collect_edges(self)?;
        let (v, e, f) = (self.vertices.len(), edges.len(), self.faces.len());
        Ok(ManifoldReport {
            vertices: v,
            edges: e,
            faces: f,
            euler_characteristic: v as i64 - e as i64 + f as i64,
        })
    }

    /// Enclosed volume by the divergence theorem. Positive for outward winding.
    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|&[a, b, c]| {
                self.vertices[a].dot(&self.vertices[b].cross(&self.vertices[c])) / 6.0
            })
            .sum()
    }

    /// Centroid of the enclosed volume (the center of mass at constant density).
    pub fn volume_centroid(&self) -> Vector3<f64> {
        let mut moment = Vector3::zeros();
        let mut volume = 0.0;
        for &[a, b, c] in &self.faces {
            let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
            let tet = p.dot(&q.cross(&r)) / 6.0;
            volume += tet;
            moment += (p + q + r) * (tet / 4.0);
        }
        moment / volume
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [p, q, r] = self.face_vertices(face);
        (q - p).cross(&(r - q)).norm() / 2.0
    }

    pub fn max_vertex_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Length of the axis-aligned bounding box diagonal, meters.
    pub fn bounding_diagonal(&self) -> f64 {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (hi - lo).norm()
    }

    /// Euclidean distance from `point` to the nearest point of any face.
    pub fn distance_to_surface(&self, point: &Vector3<f64>) -> f64 {
        (0..self.faces.len())
            .map(|f| {
                let [a, b, c] = self.face_vertices(f);
                (closest_point_on_triangle(point, &a, &b, &c) - point).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `point` to the nearest vertex.
    pub fn distance_to_nearest_vertex(&self, point: &Vector3<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v - point).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Same connectivity, vertices mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(f).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_vertices(|v| v * factor)
    }

    pub fn translated(&self, offset: &Vector3<f64>) -> Self {
        self.map_vertices(|v| v + offset)
    }

    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        self.map_vertices(|v| rotation * v)
    }

    /// Shift the mesh so its volume centroid sits at the origin.
    pub fn centered(&self) -> Self {
        self.translated(&-self.volume_centroid())
    }

    /// Reorder faces; face `k` of the result is face `order[k]` of `self`.
    ///
    /// # Panics
    ///
    /// If `order` is not a permutation of `0..faces().len()`.
    pub fn with_face_order(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.faces.len());
        let mut seen = alloc::vec![false; order.len()];
        let faces = order
            .iter()
            .map(|&k| {
                assert!(!seen[k], "face order is not a permutation");
                seen[k] = true;
                self.faces[k]
            })
            .collect();
        Self {
            vertices: self.vertices.clone(),
            faces,
        }
    }
}

// Voronoi-region walk over vertices, edges and interior of the triangle.
fn closest_point_on_triangle(
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> Vector3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}
