//! Exterior gravitational field of a constant-density polyhedron.
//!
//! The potential, attraction, gravity-gradient matrix and Laplacian are
//! closed-form sums over the edges and faces of the shape model:
//!
//! ```text
//! U     =  Gσ/2 Σ_e r_e·E_e·r_e L_e  -  Gσ/2 Σ_f r_f·F_f·r_f ω_f
//! ∇U    = -Gσ   Σ_e E_e·r_e L_e      +  Gσ   Σ_f F_f·r_f ω_f
//! ∇∇U   =  Gσ   Σ_e E_e L_e          -  Gσ   Σ_f F_f ω_f
//! ∇²U   = -Gσ   Σ_f ω_f
//! ```
//!
//! `r_e`, `r_f` point from the field point to a vertex of the edge / face.
//! `∇²U` is `-4πGσ` inside the body and zero outside, which makes it a
//! cheap collision test.

mod factors;

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub use factors::{edge_factor, face_factor};
use factors::face_factor_with_norms;

use crate::shape_model::{build_dyads, build_topology, DyadCache, MeshError, TriangleMesh};

/// Relative singularity guard: multiples of the mesh bounding diagonal.
pub const SINGULAR_EDGE_SCALE: f64 = 1e-10;

/// Tolerance on the winding number `-∇²U / 4πGσ` when classifying points.
pub const CLASSIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Simplex {
    Edge(usize),
    Face(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GravityError {
    #[error("gravitational constant and density must be positive and finite (G = {g}, sigma = {density})")]
    InvalidParameters { g: f64, density: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("field point lies on edge {edge:?} (r_i + r_j - e_ij = {gap:e})")]
    SingularEdge { edge: Option<usize>, gap: f64 },
    #[error("field point lies on a vertex of face {face:?}")]
    SingularFace {
        face: Option<usize>,
        numerator: f64,
        denominator: f64,
    },
    #[error("non-finite contribution from {simplex:?}")]
    NonFinite { simplex: Simplex },
    #[error("ambiguous containment: winding number {winding} is neither 0 nor 1")]
    Ambiguous { winding: f64 },
}

/// Field quantities at one body-frame point. SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldEvaluation {
    /// U, m²/s².
    pub potential: f64,
    /// ∇U, m/s². Points toward the body.
    pub attraction: Vector3<f64>,
    /// ∇∇U, 1/s².
    pub gradient: Matrix3<f64>,
    /// ∇²U, 1/s².
    pub laplacian: f64,
}

impl FieldEvaluation {
    pub const ZERO: Self = Self {
        potential: 0.0,
        attraction: Vector3::new(0.0, 0.0, 0.0),
        gradient: Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        laplacian: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Exterior,
    Interior,
}

/// Which vertex stands in for "any point on the edge / face".
///
/// The field does not depend on the choice; it is exposed so that the
/// independence can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Anchor {
    /// 0 or 1: endpoint of each edge.
    pub edge: usize,
    /// 0, 1 or 2: corner of each face.
    pub face: usize,
}

/// Constant-density polyhedron gravity model. Immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct GravityModel {
    dyads: DyadCache,
    gravitational_constant: f64,
    density: f64,
    edge_tolerance: f64,
    face_tolerance: f64,
}

#[derive(Clone, Copy)]
struct Partial {
    potential: f64,
    attraction: Vector3<f64>,
    gradient: Matrix3<f64>,
    solid_angle: f64,
}

impl Partial {
    const ZERO: Self = Self {
        potential: 0.0,
        attraction: Vector3::new(0.0, 0.0, 0.0),
        gradient: Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        solid_angle: 0.0,
    };

    fn accumulate(mut self, other: &Self) -> Self {
        self.potential += other.potential;
        self.attraction += other.attraction;
        self.gradient += other.gradient;
        self.solid_angle += other.solid_angle;
        self
    }

    fn is_finite(&self) -> bool {
        self.potential.is_finite()
            && self.attraction.iter().all(|c| c.is_finite())
            && self.gradient.iter().all(|c| c.is_finite())
            && self.solid_angle.is_finite()
    }
}

/// Above this many simplices the `parallel` feature fans the per-simplex
/// terms out to worker threads. The reduction stays in index order.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 4096;

impl GravityModel {
    pub fn new(dyads: DyadCache, gravitational_constant: f64, density: f64) -> Result<Self, GravityError> {
        let valid = |x: f64| x.is_finite() && x > 0.0;
        if !valid(gravitational_constant) || !valid(density) {
            return Err(GravityError::InvalidParameters {
                g: gravitational_constant,
                density,
            });
        }
        let edge_tolerance = SINGULAR_EDGE_SCALE * dyads.topology().mesh().bounding_diagonal();
        Ok(Self {
            dyads,
            gravitational_constant,
            density,
            edge_tolerance,
            face_tolerance: edge_tolerance * edge_tolerance * edge_tolerance,
        })
    }

    /// Validate `mesh`, precompute its dyads and wrap them in a model.
    pub fn from_mesh(mesh: &TriangleMesh, gravitational_constant: f64, density: f64) -> Result<Self, GravityError> {
        let dyads = build_dyads(build_topology(mesh)?);
        Self::new(dyads, gravitational_constant, density)
    }

    pub fn dyads(&self) -> &DyadCache {
        &self.dyads
    }

    pub fn mesh(&self) -> &TriangleMesh {
        self.dyads.topology().mesh()
    }

    pub fn gravitational_constant(&self) -> f64 {
        self.gravitational_constant
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// σ times the enclosed volume, kg.
    pub fn mass(&self) -> f64 {
        self.density * self.mesh().volume()
    }

    /// G M, m³/s².
    pub fn gravitational_parameter(&self) -> f64 {
        self.gravitational_constant * self.mass()
    }

    /// The interior value of the Laplacian, `-4πGσ`.
    pub fn interior_laplacian(&self) -> f64 {
        -4.0 * PI * self.gravitational_constant * self.density
    }

    /// `∇²U / (-4πGσ)`: 1 inside, 0 outside, fractional on the surface.
    pub fn winding_number(&self, field: &FieldEvaluation) -> f64 {
        field.laplacian / self.interior_laplacian()
    }

    pub fn evaluate(&self, point: &Vector3<f64>) -> Result<FieldEvaluation, GravityError> {
        self.evaluate_anchored(point, Anchor::default())
    }

    /// [`evaluate`](Self::evaluate) with an explicit choice of edge and face
    /// anchor vertices.
    pub fn evaluate_anchored(&self, point: &Vector3<f64>, anchor: Anchor) -> Result<FieldEvaluation, GravityError> {
        let mesh = self.mesh();
        let rel: Vec<Vector3<f64>> = mesh.vertices().iter().map(|v| v - point).collect();
        let dist: Vec<f64> = rel.iter().map(|r| r.norm()).collect();

        let edges = self.dyads.topology().edges();
        let faces = mesh.faces();
        let edge_term = |k: usize| -> Result<Partial, GravityError> {
            let [i, j] = edges[k].vertices;
            let length = self.dyads.edge_lengths()[k];
            let l = edge_factor(dist[i], dist[j], length, self.edge_tolerance).map_err(|e| match e {
                GravityError::SingularEdge { gap, .. } => GravityError::SingularEdge { edge: Some(k), gap },
                other => other,
            })?;
            let dyad = &self.dyads.edge_dyads()[k];
            let re = &rel[edges[k].vertices[anchor.edge]];
            let er = dyad * re;
            let term = Partial {
                potential: re.dot(&er) * l,
                attraction: -er * l,
                gradient: dyad * l,
                solid_angle: 0.0,
            };
            if term.is_finite() {
                Ok(term)
            } else {
                Err(GravityError::NonFinite { simplex: Simplex::Edge(k) })
            }
        };
        let face_term = |k: usize| -> Result<Partial, GravityError> {
            let [a, b, c] = faces[k];
            let w = face_factor_with_norms(&rel[a], &rel[b], &rel[c], [dist[a], dist[b], dist[c]], self.face_tolerance)
                .map_err(|e| match e {
                    GravityError::SingularFace { numerator, denominator, .. } => GravityError::SingularFace {
                        face: Some(k),
                        numerator,
                        denominator,
                    },
                    other => other,
                })?;
            let dyad = &self.dyads.face_dyads()[k];
            let rf = &rel[faces[k][anchor.face]];
            let fr = dyad * rf;
            let term = Partial {
                potential: -rf.dot(&fr) * w,
                attraction: fr * w,
                gradient: -dyad * w,
                solid_angle: w,
            };
            if term.is_finite() {
                Ok(term)
            } else {
                Err(GravityError::NonFinite { simplex: Simplex::Face(k) })
            }
        };

        let edge_sum = reduce(edges.len(), edge_term)?;
        let face_sum = reduce(faces.len(), face_term)?;
        let total = edge_sum.accumulate(&face_sum);

        let g_sigma = self.gravitational_constant * self.density;
        Ok(FieldEvaluation {
            potential: 0.5 * g_sigma * total.potential,
            attraction: g_sigma * total.attraction,
            gradient: g_sigma * total.gradient,
            laplacian: -g_sigma * total.solid_angle,
        })
    }

    /// Inside/outside test from the Laplacian.
    ///
    /// Points within the singularity guard of the surface count as
    /// interior, so contact is reported conservatively.
    pub fn classify(&self, point: &Vector3<f64>) -> Result<Containment, GravityError> {
        let mesh = self.mesh();
        if mesh.distance_to_surface(point) < self.edge_tolerance {
            return Ok(Containment::Interior);
        }
        let mut solid_angle = 0.0;
        for face in mesh.faces() {
            let [a, b, c] = face.map(|v| mesh.vertices()[v] - point);
            match face_factor(&a, &b, &c, self.face_tolerance) {
                Ok(w) => solid_angle += w,
                Err(GravityError::SingularFace { .. }) => return Ok(Containment::Interior),
                Err(e) => return Err(e),
            }
        }
        let winding = solid_angle / (4.0 * PI);
        if (winding - 1.0).abs() < CLASSIFY_TOLERANCE {
            Ok(Containment::Interior)
        } else if winding.abs() < CLASSIFY_TOLERANCE {
            Ok(Containment::Exterior)
        } else {
            Err(GravityError::Ambiguous { winding })
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn reduce(
    count: usize,
    term: impl Fn(usize) -> Result<Partial, GravityError>,
) -> Result<Partial, GravityError> {
    (0..count).try_fold(Partial::ZERO, |acc, k| Ok(acc.accumulate(&term(k)?)))
}

#[cfg(feature = "parallel")]
fn reduce(
    count: usize,
    term: impl Fn(usize) -> Result<Partial, GravityError> + Sync + Send,
) -> Result<Partial, GravityError> {
    use rayon::prelude::*;
    if count < PARALLEL_THRESHOLD {
        return (0..count).try_fold(Partial::ZERO, |acc, k| Ok(acc.accumulate(&term(k)?)));
    }
    let terms: Vec<Partial> = (0..count).into_par_iter().map(term).collect::<Result<_, _>>()?;
    Ok(terms.iter().fold(Partial::ZERO, |acc, t| acc.accumulate(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape_model::primitives;

    fn unit_cube() -> GravityModel {
        GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_non_positive_parameters() {
        let mesh = primitives::cube(1.0);
        assert!(matches!(
            GravityModel::from_mesh(&mesh, 0.0, 1.0),
            Err(GravityError::InvalidParameters { .. })
        ));
        assert!(GravityModel::from_mesh(&mesh, 1.0, -2.0).is_err());
    }

    #[test]
    fn solid_angle_sum_inside_and_outside() {
        let model = unit_cube();
        let inside = model.evaluate(&Vector3::zeros()).unwrap();
        assert!((inside.laplacian / model.interior_laplacian() - 1.0).abs() < 1e-12);
        let outside = model.evaluate(&Vector3::new(4.0, -3.0, 2.0)).unwrap();
        assert!(outside.laplacian.abs() < 1e-12);
    }

    #[test]
    fn attraction_points_toward_body() {
        let model = unit_cube();
        let p = Vector3::new(3.0, 1.0, -0.5);
        let f = model.evaluate(&p).unwrap();
        assert!(f.attraction.dot(&p) < 0.0);
        assert!(f.potential > 0.0);
    }

    #[test]
    fn gradient_is_symmetric_and_traced_by_laplacian() {
        let model = GravityModel::from_mesh(&primitives::itokawa_like(), 6.674e-11, 1900.0).unwrap();
        for p in [Vector3::new(400.0, 50.0, -20.0), Vector3::new(0.0, 0.0, 10.0)] {
            let f = model.evaluate(&p).unwrap();
            let scale = f.gradient.abs().max();
            assert!((f.gradient - f.gradient.transpose()).abs().max() <= 1e-12 * scale);
            assert!((f.gradient.trace() - f.laplacian).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn centrally_symmetric_body_is_odd_in_attraction() {
        let model = unit_cube();
        let p = Vector3::new(1.3, -0.7, 2.1);
        let (a, b) = (model.evaluate(&p).unwrap(), model.evaluate(&-p).unwrap());
        assert!((a.potential - b.potential).abs() <= 1e-12 * a.potential.abs());
        assert!((a.attraction + b.attraction).norm() <= 1e-12 * a.attraction.norm());
    }

    #[test]
    fn point_on_edge_reports_simplex() {
        let model = unit_cube();
        let err = model.evaluate(&Vector3::new(0.5, 0.5, 0.1)).unwrap_err();
        assert!(matches!(err, GravityError::SingularEdge { edge: Some(_), .. }), "{err}");
    }

    #[test]
    fn classification() {
        let model = unit_cube();
        assert_eq!(model.classify(&Vector3::zeros()).unwrap(), Containment::Interior);
        assert_eq!(
            model.classify(&Vector3::new(10.0, 10.0, 10.0)).unwrap(),
            Containment::Exterior
        );
        // just above the centroid of a face on the +z side
        let topo = model.dyads().topology();
        let f = (0..12).find(|&f| topo.face_normal(f).z > 0.9).unwrap();
        let [a, b, c] = model.mesh().face_vertices(f);
        let above = (a + b + c) / 3.0 + Vector3::z() * 1e-6;
        assert_eq!(model.classify(&above).unwrap(), Containment::Exterior);
        assert!(model.evaluate(&above).unwrap().laplacian.abs() < 1e-9);
        // on the face itself
        let on = (a + b + c) / 3.0;
        assert_eq!(model.classify(&on).unwrap(), Containment::Interior);
    }
}
