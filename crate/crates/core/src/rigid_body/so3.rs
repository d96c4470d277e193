//! Hat/vee maps and the exponential map on SO(3).

use nalgebra::{Matrix3, Vector3};

use super::DynamicsError;
use crate::math::{cos, sin};

/// Skew-symmetry tolerance accepted by [`vee`].
pub const SKEW_TOLERANCE: f64 = 1e-9;

/// `hat(w) x = w × x`.
pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat`]. Rejects matrices that are not skew-symmetric.
pub fn vee(s: &Matrix3<f64>) -> Result<Vector3<f64>, DynamicsError> {
    let asymmetry = (s + s.transpose()).abs().max();
    if !(asymmetry <= SKEW_TOLERANCE * s.abs().max().max(1.0)) {
        return Err(DynamicsError::NotSkew { asymmetry });
    }
    Ok(skew_vee(s))
}

/// Vee of the skew part `(S - Sᵀ)/2`, no check.
pub fn skew_vee(s: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        s[(2, 1)] - s[(1, 2)],
        s[(0, 2)] - s[(2, 0)],
        s[(1, 0)] - s[(0, 1)],
    ) * 0.5
}

/// Rodrigues' formula.
pub fn exp(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = w.norm_squared();
    let (a, b) = if theta2 < 1e-12 {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let theta = crate::math::sqrt(theta2);
        (sin(theta) / theta, (1.0 - cos(theta)) / theta2)
    };
    let k = hat(w);
    Matrix3::identity() + k * a + k * k * b
}

/// Rotation angle in `[0, π]`.
pub fn angle(r: &Matrix3<f64>) -> f64 {
    crate::math::acos((r.trace() - 1.0) / 2.0)
}

/// Rate of the exponential coordinates `θ` of `R = R₀ exp(θ^)` driven by
/// the body angular velocity `omega`: the inverse right Jacobian applied to
/// `omega`.
pub fn dexp_inv(theta: &Vector3<f64>, omega: &Vector3<f64>) -> Vector3<f64> {
    let t2 = theta.norm_squared();
    let c = if t2 < 1e-8 {
        1.0 / 12.0 + t2 / 720.0
    } else {
        let t = crate::math::sqrt(t2);
        1.0 / t2 - (1.0 + cos(t)) / (2.0 * t * sin(t))
    };
    let tw = theta.cross(omega);
    omega + tw * 0.5 + theta.cross(&tw) * c
}

/// Frobenius norm of `RᵀR - I`.
pub fn orthogonality_error(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).norm()
}

/// Nearest rotation matrix in the Frobenius sense.
pub fn project(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * v_t;
    }
    r
}
