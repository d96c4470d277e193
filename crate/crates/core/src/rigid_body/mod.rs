//! Dumbbell spacecraft on SE(3) in the field of a uniformly rotating
//! polyhedral asteroid.
//!
//! Frames: the inertial frame `e_i`, the spacecraft body frame `b_i` (`R`
//! maps body to inertial) and the asteroid frame `f_i` (`R_A` maps asteroid
//! to inertial). The asteroid spins about `e_3 = f_3`.

mod dynamics;
mod integrator;
pub mod so3;

pub use dynamics::{Dynamics, GravityWrench, MomentConvention, StateDerivative};
pub use integrator::{step, StepOutcome};

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::gravity::{GravityError, GravityModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("matrix is not skew-symmetric (|S + S^T| = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },
    #[error("invalid spacecraft parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("inertia matrix is singular or not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    SingularInertia { min_eigenvalue: f64 },
    #[error("mass {mass} contacted the asteroid at asteroid-frame point {point:?}")]
    Collision { mass: usize, point: [f64; 3] },
    #[error(transparent)]
    Gravity(#[from] GravityError),
    #[error("non-finite state derivative")]
    NonFiniteDerivative,
    #[error("non-finite state after integration step")]
    NonFiniteState,
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Spacecraft state on SE(3) × R⁶.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacecraftState {
    /// Inertial position of the center of mass, m.
    pub position: Vector3<f64>,
    /// Inertial velocity, m/s.
    pub velocity: Vector3<f64>,
    /// Body-to-inertial rotation.
    pub attitude: Matrix3<f64>,
    /// Body angular velocity, rad/s.
    pub angular_velocity: Vector3<f64>,
    /// s.
    pub time: f64,
}

impl SpacecraftState {
    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|c| c.is_finite())
            && self.velocity.iter().all(|c| c.is_finite())
            && self.attitude.iter().all(|c| c.is_finite())
            && self.angular_velocity.iter().all(|c| c.is_finite())
            && self.time.is_finite()
    }
}

/// Two masses on a massless rod, each regularized as a solid sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct DumbbellParams {
    masses: [f64; 2],
    offsets: [Vector3<f64>; 2],
    sphere_radius: f64,
    inertia: Matrix3<f64>,
    inertia_inverse: Matrix3<f64>,
}

impl DumbbellParams {
    /// Masses `m1`, `m2` separated by `length` along `b1`, which points from
    /// `m1` to `m2`. Offsets are measured from the center of mass.
    pub fn new(m1: f64, m2: f64, length: f64, sphere_radius: f64) -> Result<Self, DynamicsError> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(DynamicsError::InvalidParameters("rod length must be non-negative"));
        }
        let total = m1 + m2;
        let offsets = [
            Vector3::x() * (-length * m2 / total),
            Vector3::x() * (length * m1 / total),
        ];
        Self::with_offsets([m1, m2], offsets, sphere_radius)
    }

    /// Arbitrary body-frame offsets; they must balance about the origin.
    pub fn with_offsets(
        masses: [f64; 2],
        offsets: [Vector3<f64>; 2],
        sphere_radius: f64,
    ) -> Result<Self, DynamicsError> {
        let inertia = inertia_from_dumbbell(masses, offsets, sphere_radius)?;
        let balance = offsets[0] * masses[0] + offsets[1] * masses[1];
        let scale = masses[0] * offsets[0].norm() + masses[1] * offsets[1].norm();
        if balance.norm() > 1e-9 * scale.max(1.0) {
            return Err(DynamicsError::InvalidParameters(
                "mass offsets are not measured from the center of mass",
            ));
        }
        let inertia_inverse = inertia
            .try_inverse()
            .ok_or(DynamicsError::SingularInertia { min_eigenvalue: 0.0 })?;
        Ok(Self {
            masses,
            offsets,
            sphere_radius,
            inertia,
            inertia_inverse,
        })
    }

    pub fn masses(&self) -> [f64; 2] {
        self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses[0] + self.masses[1]
    }

    pub fn offsets(&self) -> &[Vector3<f64>; 2] {
        &self.offsets
    }

    pub fn sphere_radius(&self) -> f64 {
        self.sphere_radius
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    pub fn inertia_inverse(&self) -> &Matrix3<f64> {
        &self.inertia_inverse
    }

    /// Largest principal moment, kg m².
    pub fn max_principal_inertia(&self) -> f64 {
        self.inertia.symmetric_eigenvalues().max()
    }
}

/// `J = Σ m_i (|ρ_i|² I - ρ_i ρ_iᵀ) + (2/5) m_i r_s² I`.
///
/// Two point masses alone have no inertia about the rod, so each mass is
/// treated as a solid sphere of radius `sphere_radius`.
pub fn inertia_from_dumbbell(
    masses: [f64; 2],
    offsets: [Vector3<f64>; 2],
    sphere_radius: f64,
) -> Result<Matrix3<f64>, DynamicsError> {
    if !masses.iter().all(|m| m.is_finite() && *m > 0.0) {
        return Err(DynamicsError::InvalidParameters("masses must be positive"));
    }
    if !(sphere_radius.is_finite() && sphere_radius >= 0.0) {
        return Err(DynamicsError::InvalidParameters("sphere radius must be non-negative"));
    }
    let mut j = Matrix3::zeros();
    for (m, rho) in masses.iter().zip(&offsets) {
        j += (Matrix3::identity() * rho.norm_squared() - rho * rho.transpose()) * *m;
        j += Matrix3::identity() * (0.4 * m * sphere_radius * sphere_radius);
    }
    let eig = j.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    if !(lo > 1e-12 * hi.max(f64::MIN_POSITIVE)) {
        return Err(DynamicsError::SingularInertia { min_eigenvalue: lo });
    }
    Ok(j)
}

/// Known uniform rotation of the asteroid about `e_3`:
/// `R_A(t) = exp(ω_A t ê₃) R_A(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsteroidRotation {
    rate: f64,
    initial: Matrix3<f64>,
}

impl AsteroidRotation {
    pub fn new(rate: f64, initial: Matrix3<f64>) -> Self {
        Self { rate, initial }
    }

    pub fn fixed() -> Self {
        Self::new(0.0, Matrix3::identity())
    }

    /// Spin rate from a rotation period in seconds.
    pub fn from_period(period: f64) -> Self {
        Self::new(2.0 * core::f64::consts::PI / period, Matrix3::identity())
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn spin_axis(&self) -> Vector3<f64> {
        Vector3::z()
    }

    pub fn attitude(&self, t: f64) -> Matrix3<f64> {
        so3::exp(&(Vector3::z() * (self.rate * t))) * self.initial
    }

    /// Inertial angular velocity of the asteroid.
    pub fn angular_velocity(&self) -> Vector3<f64> {
        Vector3::z() * self.rate
    }
}

/// Asteroid shape/gravity and rotation. With `gravity_enabled` off the
/// body exerts no force and is never tested for contact.
#[derive(Debug, Clone)]
pub struct AsteroidModel {
    pub body: GravityModel,
    pub rotation: AsteroidRotation,
    pub gravity_enabled: bool,
}

impl AsteroidModel {
    pub fn new(body: GravityModel, rotation: AsteroidRotation) -> Self {
        Self {
            body,
            rotation,
            gravity_enabled: true,
        }
    }

    pub fn without_gravity(mut self) -> Self {
        self.gravity_enabled = false;
        self
    }
}

/// Control force (inertial, N) and moment (body, N m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WrenchInput {
    pub force: Vector3<f64>,
    pub moment: Vector3<f64>,
}

impl WrenchInput {
    pub const ZERO: Self = Self {
        force: Vector3::new(0.0, 0.0, 0.0),
        moment: Vector3::new(0.0, 0.0, 0.0),
    };

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.moment.iter()).all(|c| c.is_finite())
    }
}
