use nalgebra::Vector3;

use super::GravityError;
use crate::math::{atan2, log};

/// Logarithmic potential factor of a straight edge.
///
/// `r_i`, `r_j` are the distances from the field point to the edge
/// endpoints and `length` the edge length. Fails when
/// `r_i + r_j - length < tolerance`, which means the point sits on the edge.
pub fn edge_factor(r_i: f64, r_j: f64, length: f64, tolerance: f64) -> Result<f64, GravityError> {
    let sum = r_i + r_j;
    let gap = sum - length;
    if !(gap >= tolerance) {
        return Err(GravityError::SingularEdge { edge: None, gap });
    }
    Ok(log((sum + length) / gap))
}

/// Signed solid angle subtended by the triangle `(r_i, r_j, r_k)` at the
/// field point, with `r_*` pointing from the field point to the vertices.
///
/// Negative when the field point lies on the side the face normal points
/// to. The full-quadrant arctangent keeps the sum over a closed surface at
/// `4 pi` for interior points. Fails when both arctangent arguments fall
/// below `tolerance` (the point coincides with a vertex).
pub fn face_factor(
    r_i: &Vector3<f64>,
    r_j: &Vector3<f64>,
    r_k: &Vector3<f64>,
    tolerance: f64,
) -> Result<f64, GravityError> {
    face_factor_with_norms(r_i, r_j, r_k, [r_i.norm(), r_j.norm(), r_k.norm()], tolerance)
}

#[inline]
pub(crate) fn face_factor_with_norms(
    r_i: &Vector3<f64>,
    r_j: &Vector3<f64>,
    r_k: &Vector3<f64>,
    [ni, nj, nk]: [f64; 3],
    tolerance: f64,
) -> Result<f64, GravityError> {
    let num = r_i.dot(&r_j.cross(r_k));
    let den = ni * nj * nk + ni * r_j.dot(r_k) + nj * r_k.dot(r_i) + nk * r_i.dot(r_j);
    if num.abs() < tolerance && den.abs() < tolerance {
        return Err(GravityError::SingularFace {
            face: None,
            numerator: num,
            denominator: den,
        });
    }
    Ok(2.0 * atan2(num, den))
}
