use nalgebra::Vector3;

use super::so3::hat;
use super::{AsteroidModel, DumbbellParams, DynamicsError, SpacecraftState, WrenchInput};
use crate::gravity::{FieldEvaluation, GravityError};

/// How the per-mass gravitational moment is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentConvention {
    /// `M_i = m_i ρ_i × (Rᵀ R_A ∇U(z_i))`: body-frame arm crossed with the
    /// body-frame force. Consistent with the translational equation.
    #[default]
    BodyFrame,
    /// `M_i = m_i S(R_Aᵀ ρ_i) Rᵀ ∇U(z_i)`, composed literally. Agrees with
    /// [`BodyFrame`](Self::BodyFrame) only when `R = R_A = I`.
    Literal,
}

/// Gravitational forces and moments on both masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityWrench {
    /// `F_i = m_i R_A ∇U(z_i)`, inertial frame, N.
    pub forces: [Vector3<f64>; 2],
    /// `M_i`, body frame, N m.
    pub moments: [Vector3<f64>; 2],
    /// Field at each mass, asteroid frame.
    pub fields: [FieldEvaluation; 2],
}

impl GravityWrench {
    pub fn total_force(&self) -> Vector3<f64> {
        self.forces[0] + self.forces[1]
    }

    pub fn total_moment(&self) -> Vector3<f64> {
        self.moments[0] + self.moments[1]
    }
}

/// Time derivative of a [`SpacecraftState`]. The attitude rate is
/// `Ṙ = R hat(angular_velocity)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
    pub angular_acceleration: Vector3<f64>,
}

/// Coupled orbit/attitude dynamics of a dumbbell about an asteroid.
#[derive(Debug, Clone)]
pub struct Dynamics {
    pub asteroid: AsteroidModel,
    pub spacecraft: DumbbellParams,
    pub moment_convention: MomentConvention,
}

impl Dynamics {
    pub fn new(asteroid: AsteroidModel, spacecraft: DumbbellParams) -> Self {
        Self {
            asteroid,
            spacecraft,
            moment_convention: MomentConvention::default(),
        }
    }

    /// Asteroid-frame positions of the two masses, `z_i = R_Aᵀ (x + R ρ_i)`.
    pub fn mass_positions(&self, state: &SpacecraftState) -> [Vector3<f64>; 2] {
        let ra_t = self.asteroid.rotation.attitude(state.time).transpose();
        self.spacecraft
            .offsets()
            .map(|rho| ra_t * (state.position + state.attitude * rho))
    }

    /// Field at each mass. Contact with the body (surface singularity or a
    /// Laplacian that says "inside") is reported as a collision.
    pub fn mass_fields(&self, state: &SpacecraftState) -> Result<[FieldEvaluation; 2], DynamicsError> {
        if !self.asteroid.gravity_enabled {
            return Ok([FieldEvaluation::ZERO; 2]);
        }
        let gravity = &self.asteroid.body;
        let z = self.mass_positions(state);
        let mut out = [FieldEvaluation::ZERO; 2];
        for (mass, point) in z.iter().enumerate() {
            let collision = DynamicsError::Collision {
                mass,
                point: [point.x, point.y, point.z],
            };
            let field = match gravity.evaluate(point) {
                Ok(f) => f,
                Err(GravityError::SingularEdge { .. } | GravityError::SingularFace { .. }) => {
                    return Err(collision)
                }
                Err(e) => return Err(e.into()),
            };
            if gravity.winding_number(&field) > 0.5 {
                return Err(collision);
            }
            out[mass] = field;
        }
        Ok(out)
    }

    pub fn gravity_wrench(&self, state: &SpacecraftState) -> Result<GravityWrench, DynamicsError> {
        let fields = self.mass_fields(state)?;
        let ra = self.asteroid.rotation.attitude(state.time);
        let masses = self.spacecraft.masses();
        let offsets = self.spacecraft.offsets();
        let r_t = state.attitude.transpose();

        let mut forces = [Vector3::zeros(); 2];
        let mut moments = [Vector3::zeros(); 2];
        for i in 0..2 {
            let grad = &fields[i].attraction;
            forces[i] = ra * grad * masses[i];
            moments[i] = match self.moment_convention {
                MomentConvention::BodyFrame => offsets[i].cross(&(r_t * forces[i])),
                MomentConvention::Literal => hat(&(ra.transpose() * offsets[i])) * (r_t * grad) * masses[i],
            };
        }
        Ok(GravityWrench {
            forces,
            moments,
            fields,
        })
    }

    /// `ẋ = v`, `m v̇ = F + u_f`, `Ṙ = R Ω^`, `J Ω̇ = -Ω × JΩ + M + u_m`.
    pub fn derivative(&self, state: &SpacecraftState, wrench: &WrenchInput) -> Result<StateDerivative, DynamicsError> {
        let gravity = self.gravity_wrench(state)?;
        self.derivative_with(state, &gravity, wrench)
    }

    /// [`derivative`](Self::derivative) with a precomputed gravity wrench.
    pub fn derivative_with(
        &self,
        state: &SpacecraftState,
        gravity: &GravityWrench,
        wrench: &WrenchInput,
    ) -> Result<StateDerivative, DynamicsError> {
        let j = self.spacecraft.inertia();
        let omega = &state.angular_velocity;
        let acceleration = (gravity.total_force() + wrench.force) / self.spacecraft.total_mass();
        let torque = -omega.cross(&(j * omega)) + gravity.total_moment() + wrench.moment;
        let angular_acceleration = self.spacecraft.inertia_inverse() * torque;
        let d = StateDerivative {
            velocity: state.velocity,
            acceleration,
            angular_velocity: *omega,
            angular_acceleration,
        };
        let finite = d
            .acceleration
            .iter()
            .chain(d.angular_acceleration.iter())
            .chain(d.velocity.iter())
            .all(|c| c.is_finite());
        if finite {
            Ok(d)
        } else {
            Err(DynamicsError::NonFiniteDerivative)
        }
    }

    pub fn kinetic_energy(&self, state: &SpacecraftState) -> f64 {
        let omega = &state.angular_velocity;
        0.5 * self.spacecraft.total_mass() * state.velocity.norm_squared()
            + 0.5 * omega.dot(&(self.spacecraft.inertia() * omega))
    }

    /// `V = -Σ m_i U(z_i)`.
    pub fn potential_energy(&self, state: &SpacecraftState) -> Result<f64, DynamicsError> {
        let fields = self.mass_fields(state)?;
        let m = self.spacecraft.masses();
        Ok(-(m[0] * fields[0].potential + m[1] * fields[1].potential))
    }

    pub fn total_energy(&self, state: &SpacecraftState) -> Result<f64, DynamicsError> {
        Ok(self.kinetic_energy(state) + self.potential_energy(state)?)
    }

    /// Inertial angular momentum about the origin: `m x × v + R J Ω`.
    pub fn angular_momentum(&self, state: &SpacecraftState) -> Vector3<f64> {
        state.position.cross(&state.velocity) * self.spacecraft.total_mass()
            + state.attitude * (self.spacecraft.inertia() * state.angular_velocity)
    }

    /// Energy in the frame co-rotating with the asteroid, conserved when the
    /// spacecraft is uncontrolled: `E - ω_A · H`.
    pub fn rotating_frame_energy(&self, state: &SpacecraftState) -> Result<f64, DynamicsError> {
        Ok(self.total_energy(state)?
            - self.asteroid.rotation.angular_velocity().dot(&self.angular_momentum(state)))
    }
}
