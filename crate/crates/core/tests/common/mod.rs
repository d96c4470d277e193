//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use sbdyn_core::controller::{compute_control, ControlGains};
use sbdyn_core::guidance::TrajectoryCommand;
use sbdyn_core::rigid_body::{so3, Dynamics, SpacecraftState};

/// Five-point Gauss-Legendre nodes and weights on [-1, 1].
pub const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// `Gσ ∫ dV / |p - q|` over the axis-aligned cube `[-s/2, s/2]³`, by
/// composite Gauss-Legendre on `cells³` sub-cubes.
pub fn cube_potential_quadrature(p: &Vector3<f64>, side: f64, cells: usize, g_sigma: f64) -> f64 {
    let h = side / cells as f64;
    let half = h / 2.0;
    let mut sum = 0.0;
    for i in 0..cells {
        for j in 0..cells {
            for k in 0..cells {
                let c = Vector3::new(
                    -side / 2.0 + (i as f64 + 0.5) * h,
                    -side / 2.0 + (j as f64 + 0.5) * h,
                    -side / 2.0 + (k as f64 + 0.5) * h,
                );
                for (a, wa) in GL5 {
                    for (b, wb) in GL5 {
                        for (d, wd) in GL5 {
                            let q = c + Vector3::new(a, b, d) * half;
                            sum += wa * wb * wd / (p - q).norm();
                        }
                    }
                }
            }
        }
    }
    g_sigma * sum * half * half * half
}

/// Closed-form potential of a homogeneous rectangular prism `[lo, hi]`
/// at `p` (exterior points with no zero relative coordinate).
pub fn prism_potential(p: &Vector3<f64>, lo: &Vector3<f64>, hi: &Vector3<f64>, g_sigma: f64) -> f64 {
    let f = |x: f64, y: f64, z: f64| {
        let r = (x * x + y * y + z * z).sqrt();
        x * y * (z + r).ln() + y * z * (x + r).ln() + z * x * (y + r).ln()
            - 0.5 * x * x * (y * z / (x * r)).atan()
            - 0.5 * y * y * (z * x / (y * r)).atan()
            - 0.5 * z * z * (x * y / (z * r)).atan()
    };
    let mut u = 0.0;
    for (i, x) in [lo.x - p.x, hi.x - p.x].into_iter().enumerate() {
        for (j, y) in [lo.y - p.y, hi.y - p.y].into_iter().enumerate() {
            for (k, z) in [lo.z - p.z, hi.z - p.z].into_iter().enumerate() {
                let sign = if (i + j + k) % 2 == 1 { 1.0 } else { -1.0 };
                u += sign * f(x, y, z);
            }
        }
    }
    g_sigma * u
}

/// Central-difference gradient of a scalar field.
pub fn fd_gradient(f: impl Fn(&Vector3<f64>) -> f64, p: &Vector3<f64>, h: f64) -> Vector3<f64> {
    let mut g = Vector3::zeros();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = h;
        g[k] = (f(&(p + e)) - f(&(p - e))) / (2.0 * h);
    }
    g
}

/// Central-difference Jacobian of a vector field; column `k` is `∂f/∂p_k`.
pub fn fd_jacobian(f: impl Fn(&Vector3<f64>) -> Vector3<f64>, p: &Vector3<f64>, h: f64) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = h;
        j.set_column(k, &((f(&(p + e)) - f(&(p - e))) / (2.0 * h)));
    }
    j
}

/// Uniform direction on the unit sphere.
pub fn random_unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Rotation from a random axis and angle in `[0, π)`.
pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let axis = random_unit(rng);
    let angle = rng.gen_range(0.0..std::f64::consts::PI);
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(axis), angle).into_inner()
}

/// Point at a radius in `[r_lo, r_hi]` from the origin.
pub fn random_shell_point<R: Rng>(rng: &mut R, r_lo: f64, r_hi: f64) -> Vector3<f64> {
    random_unit(rng) * rng.gen_range(r_lo..r_hi)
}

/// Principal logarithm on SO(3) via the axis-angle decomposition.
pub fn log_so3(r: &Matrix3<f64>) -> Vector3<f64> {
    let rot = nalgebra::Rotation3::from_matrix_unchecked(*r);
    rot.scaled_axis()
}

/// Residuals of the closed-loop error equations after substituting the
/// control laws into the equations of motion:
/// `J ė_Ω + k_R e_R + k_Ω e_Ω` and `m ė_v + k_x e_x + k_v e_v`.
pub fn closed_loop_residuals(
    d: &Dynamics,
    gains: &ControlGains,
    state: &SpacecraftState,
    command: &TrajectoryCommand,
) -> (Vector3<f64>, Vector3<f64>) {
    let gravity = d.gravity_wrench(state).unwrap();
    let (wrench, e) = compute_control(state, command, gains, &d.spacecraft, &gravity).unwrap();
    let deriv = d.derivative_with(state, &gravity, &wrench).unwrap();
    let rel = state.attitude.transpose() * command.attitude;
    // d/dt (RᵀR_d Ω_d) = -Ω^ RᵀR_d Ω_d + RᵀR_d Ω̇_d, since Ω_d^ Ω_d = 0.
    let e_omega_dot = deriv.angular_acceleration + so3::hat(&state.angular_velocity) * (rel * command.angular_velocity)
        - rel * command.angular_acceleration;
    let rot = d.spacecraft.inertia() * e_omega_dot + e.attitude * gains.attitude + e.angular_velocity * gains.angular_velocity;
    let e_v_dot = deriv.acceleration - command.acceleration;
    let trans = e_v_dot * d.spacecraft.total_mass() + e.position * gains.position + e.velocity * gains.velocity;
    (rot, trans)
}
