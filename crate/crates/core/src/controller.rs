//! Geometric tracking control on SE(3).

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::guidance::TrajectoryCommand;
use crate::math::sqrt;
use crate::rigid_body::{so3, DumbbellParams, GravityWrench, SpacecraftState, WrenchInput};

/// Largest `‖RᵀR - I‖_F` accepted as a rotation.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("gain and design parameters must be positive and finite: {0}")]
    InvalidGains(&'static str),
    #[error("attitude is not a rotation (|R^T R - I| = {error:e})")]
    NotRotation { error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGains {
    /// `k_x`, N/m.
    pub position: f64,
    /// `k_v`, N s/m.
    pub velocity: f64,
    /// `k_R`, N m.
    pub attitude: f64,
    /// `k_Ω`, N m s.
    pub angular_velocity: f64,
}

impl ControlGains {
    pub fn new(position: f64, velocity: f64, attitude: f64, angular_velocity: f64) -> Result<Self, ControlError> {
        let ok = [position, velocity, attitude, angular_velocity]
            .iter()
            .all(|k| k.is_finite() && *k > 0.0);
        if !ok {
            return Err(ControlError::InvalidGains("every gain must be positive"));
        }
        Ok(Self {
            position,
            velocity,
            attitude,
            angular_velocity,
        })
    }
}

/// A second-order response `s² + 2ζω_n s + ω_n²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderSpec {
    pub damping_ratio: f64,
    /// rad/s.
    pub natural_frequency: f64,
}

impl SecondOrderSpec {
    pub const DEFAULT_TRANSLATIONAL: Self = Self {
        damping_ratio: 1.0,
        natural_frequency: 0.05,
    };
    pub const DEFAULT_ROTATIONAL: Self = Self {
        damping_ratio: 1.0,
        natural_frequency: 0.2,
    };

    pub fn new(damping_ratio: f64, natural_frequency: f64) -> Result<Self, ControlError> {
        if !(damping_ratio.is_finite() && damping_ratio > 0.0) {
            return Err(ControlError::InvalidGains("damping ratio"));
        }
        if !(natural_frequency.is_finite() && natural_frequency > 0.0) {
            return Err(ControlError::InvalidGains("natural frequency"));
        }
        Ok(Self {
            damping_ratio,
            natural_frequency,
        })
    }

    /// 2% settling time `t_s ≈ 4 / (ζ ω_n)`.
    pub fn from_settling_time(settling_time: f64, damping_ratio: f64) -> Result<Self, ControlError> {
        if !(settling_time.is_finite() && settling_time > 0.0) {
            return Err(ControlError::InvalidGains("settling time"));
        }
        Self::new(damping_ratio, 4.0 / (damping_ratio * settling_time))
    }

    /// `(inertia ω_n², 2ζω_n inertia)`.
    pub fn gains_for(&self, inertia: f64) -> (f64, f64) {
        let w = self.natural_frequency;
        (inertia * w * w, 2.0 * self.damping_ratio * w * inertia)
    }
}

/// Linear design: `k_x = m ω_n²`, `k_v = 2ζω_n m` and the same rule for
/// the attitude loop with the largest principal moment of inertia.
pub fn select_gains(
    params: &DumbbellParams,
    translational: &SecondOrderSpec,
    rotational: &SecondOrderSpec,
) -> Result<ControlGains, ControlError> {
    let translational = SecondOrderSpec::new(translational.damping_ratio, translational.natural_frequency)?;
    let rotational = SecondOrderSpec::new(rotational.damping_ratio, rotational.natural_frequency)?;
    let (kx, kv) = translational.gains_for(params.total_mass());
    let (kr, kw) = rotational.gains_for(params.max_principal_inertia());
    ControlGains::new(kx, kv, kr, kw)
}

/// Largest pole magnitude of the linearized closed loop `I s² + k_d s + k_p`,
/// taken over the total mass and every principal moment of inertia.
pub fn fastest_closed_loop_rate(gains: &ControlGains, params: &DumbbellParams) -> f64 {
    let pole = |inertia: f64, kp: f64, kd: f64| {
        let disc = kd * kd - 4.0 * inertia * kp;
        if disc >= 0.0 {
            (kd + sqrt(disc)) / (2.0 * inertia)
        } else {
            sqrt(kp / inertia)
        }
    };
    let mut rate = pole(params.total_mass(), gains.position, gains.velocity);
    for j in params.inertia().symmetric_eigenvalues().iter() {
        rate = rate.max(pole(*j, gains.attitude, gains.angular_velocity));
    }
    rate
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState {
    /// `Ψ = ½ tr(I - R_dᵀR)`, in `[0, 2]`.
    pub psi: f64,
    pub attitude: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

fn check_rotation(r: &Matrix3<f64>) -> Result<(), ControlError> {
    let error = so3::orthogonality_error(r);
    if error > ORTHOGONALITY_TOLERANCE || !error.is_finite() {
        return Err(ControlError::NotRotation { error });
    }
    Ok(())
}

/// `(Ψ, e_R)` with `e_R = ½ (R_dᵀR - RᵀR_d)^∨`.
pub fn attitude_error(r: &Matrix3<f64>, r_d: &Matrix3<f64>) -> Result<(f64, Vector3<f64>), ControlError> {
    check_rotation(r)?;
    check_rotation(r_d)?;
    let rel = r_d.transpose() * r;
    let psi = (0.5 * (3.0 - rel.trace())).clamp(0.0, 2.0);
    Ok((psi, so3::skew_vee(&rel)))
}

/// `e_Ω = Ω - RᵀR_d Ω_d`.
pub fn angular_velocity_error(
    r: &Matrix3<f64>,
    omega: &Vector3<f64>,
    r_d: &Matrix3<f64>,
    omega_d: &Vector3<f64>,
) -> Vector3<f64> {
    omega - r.transpose() * (r_d * omega_d)
}

pub fn tracking_errors(state: &SpacecraftState, command: &TrajectoryCommand) -> Result<ErrorState, ControlError> {
    let (psi, e_r) = attitude_error(&state.attitude, &command.attitude)?;
    Ok(ErrorState {
        psi,
        attitude: e_r,
        angular_velocity: angular_velocity_error(
            &state.attitude,
            &state.angular_velocity,
            &command.attitude,
            &command.angular_velocity,
        ),
        position: state.position - command.position,
        velocity: state.velocity - command.velocity,
    })
}

/// `u_m = -k_R e_R - k_Ω e_Ω + Ω×JΩ - J(Ω^ RᵀR_dΩ_d - RᵀR_dΩ̇_d) - M₁ - M₂`.
pub fn control_moment(
    state: &SpacecraftState,
    command: &TrajectoryCommand,
    errors: &ErrorState,
    gains: &ControlGains,
    params: &DumbbellParams,
    moments: &[Vector3<f64>; 2],
) -> Vector3<f64> {
    let j = params.inertia();
    let omega = &state.angular_velocity;
    let rel = state.attitude.transpose() * command.attitude;
    let feedforward = so3::hat(omega) * (rel * command.angular_velocity) - rel * command.angular_acceleration;
    -errors.attitude * gains.attitude - errors.angular_velocity * gains.angular_velocity + omega.cross(&(j * omega))
        - j * feedforward
        - moments[0]
        - moments[1]
}

/// `u_f = -k_x e_x - k_v e_v + m ẍ_d - F₁ - F₂`.
pub fn control_force(
    command: &TrajectoryCommand,
    errors: &ErrorState,
    gains: &ControlGains,
    params: &DumbbellParams,
    forces: &[Vector3<f64>; 2],
) -> Vector3<f64> {
    -errors.position * gains.position - errors.velocity * gains.velocity
        + command.acceleration * params.total_mass()
        - forces[0]
        - forces[1]
}

/// Errors and the full control wrench for one state.
pub fn compute_control(
    state: &SpacecraftState,
    command: &TrajectoryCommand,
    gains: &ControlGains,
    params: &DumbbellParams,
    gravity: &GravityWrench,
) -> Result<(WrenchInput, ErrorState), ControlError> {
    let errors = tracking_errors(state, command)?;
    let wrench = WrenchInput {
        force: control_force(command, &errors, gains, params, &gravity.forces),
        moment: control_moment(state, command, &errors, gains, params, &gravity.moments),
    };
    Ok((wrench, errors))
}
