//! Fixed-step fourth-order Runge-Kutta on SE(3) × R⁶.
//!
//! Position, velocity and body rate take ordinary RK4 stages. The attitude
//! is carried in exponential coordinates about the step's initial rotation,
//! `R = R₀ exp(θ^)`, with `θ̇ = dexp⁻¹_θ(Ω)` integrated alongside, so every
//! stage attitude is exactly a rotation and the scheme keeps fourth order
//! (Munthe-Kaas).

use nalgebra::Vector3;

use super::so3;
use super::{DynamicsError, SpacecraftState, StateDerivative};

/// Re-orthonormalize `R` when `‖RᵀR - I‖_F` exceeds this.
pub const REPROJECTION_THRESHOLD: f64 = 1e-12;

/// Bisection depth used to truncate a step that runs into the asteroid.
const CONTACT_BISECTIONS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Advanced(SpacecraftState),
    /// The full step hit a terminal event. `state` is the furthest state
    /// reached without triggering it (possibly the input state).
    Terminated {
        state: SpacecraftState,
        cause: DynamicsError,
    },
}

#[derive(Clone, Copy)]
struct Slope {
    velocity: Vector3<f64>,
    acceleration: Vector3<f64>,
    angular_acceleration: Vector3<f64>,
    theta_rate: Vector3<f64>,
}

fn is_terminal(e: &DynamicsError) -> bool {
    matches!(e, DynamicsError::Collision { .. })
}

/// Advance `state` by `dt` with derivatives supplied by `derivative`.
///
/// A collision raised by any stage truncates the step: the largest partial
/// step that stays clear is found by bisection and returned as
/// [`StepOutcome::Terminated`]. Other errors propagate.
pub fn step<F>(state: &SpacecraftState, dt: f64, mut derivative: F) -> Result<StepOutcome, DynamicsError>
where
    F: FnMut(&SpacecraftState) -> Result<StateDerivative, DynamicsError>,
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::InvalidStep(dt));
    }
    match rk_step(state, dt, &mut derivative) {
        Ok(next) => Ok(StepOutcome::Advanced(next)),
        Err(cause) if is_terminal(&cause) => {
            let (mut lo, mut hi) = (0.0, dt);
            let mut best = *state;
            for _ in 0..CONTACT_BISECTIONS {
                let mid = 0.5 * (lo + hi);
                match rk_step(state, mid, &mut derivative) {
                    Ok(s) => {
                        lo = mid;
                        best = s;
                    }
                    Err(e) if is_terminal(&e) => hi = mid,
                    Err(e) => return Err(e),
                }
            }
            Ok(StepOutcome::Terminated { state: best, cause })
        }
        Err(e) => Err(e),
    }
}

fn rk_step<F>(s0: &SpacecraftState, dt: f64, derivative: &mut F) -> Result<SpacecraftState, DynamicsError>
where
    F: FnMut(&SpacecraftState) -> Result<StateDerivative, DynamicsError>,
{
    let stage = |offset: Option<(&Slope, f64)>| -> (SpacecraftState, Vector3<f64>) {
        match offset {
            None => (*s0, Vector3::zeros()),
            Some((k, h)) => {
                let theta = k.theta_rate * h;
                let s = SpacecraftState {
                    position: s0.position + k.velocity * h,
                    velocity: s0.velocity + k.acceleration * h,
                    attitude: s0.attitude * so3::exp(&theta),
                    angular_velocity: s0.angular_velocity + k.angular_acceleration * h,
                    time: s0.time + h,
                };
                (s, theta)
            }
        }
    };
    let mut slope = |s: &SpacecraftState, theta: &Vector3<f64>| -> Result<Slope, DynamicsError> {
        let StateDerivative {
            velocity,
            acceleration,
            angular_velocity,
            angular_acceleration,
        } = derivative(s)?;
        Ok(Slope {
            velocity,
            acceleration,
            angular_acceleration,
            theta_rate: so3::dexp_inv(theta, &angular_velocity),
        })
    };

    let (s1, t1) = stage(None);
    let k1 = slope(&s1, &t1)?;
    let (s2, t2) = stage(Some((&k1, 0.5 * dt)));
    let k2 = slope(&s2, &t2)?;
    let (s3, t3) = stage(Some((&k2, 0.5 * dt)));
    let k3 = slope(&s3, &t3)?;
    let (s4, t4) = stage(Some((&k3, dt)));
    let k4 = slope(&s4, &t4)?;

    let w = dt / 6.0;
    let avg = |f: fn(&Slope) -> Vector3<f64>| (f(&k1) + (f(&k2) + f(&k3)) * 2.0 + f(&k4)) * w;
    let mut attitude = s0.attitude * so3::exp(&avg(|k| k.theta_rate));
    if so3::orthogonality_error(&attitude) > REPROJECTION_THRESHOLD {
        attitude = so3::project(&attitude);
    }
    let next = SpacecraftState {
        position: s0.position + avg(|k| k.velocity),
        velocity: s0.velocity + avg(|k| k.acceleration),
        attitude,
        angular_velocity: s0.angular_velocity + avg(|k| k.angular_acceleration),
        time: s0.time + dt,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(DynamicsError::NonFiniteState)
    }
}
