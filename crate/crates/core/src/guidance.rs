//! Two-phase landing command with a nadir-pointing attitude profile.
//!
//! Phase 1 (`t ≤ t_d`) traverses a quarter circle of radius `r₀` in the
//! inertial `e₁e₂` plane. Phase 2 (`t > t_d`) moves radially in the
//! rotating asteroid frame: `x_d = R_A(t) ρ(t) a` with `ρ(t) = r₀ + ṙ (t - t_d)`
//! and a fixed asteroid-frame unit direction `a`.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::math::{atan2, cos, sin};
use crate::rigid_body::{so3, AsteroidRotation};

/// Angular margin from the spin axis below which the nadir frame is undefined.
pub const ALIGN_TOLERANCE: f64 = 1e-6;

/// Central-difference step for the desired angular velocity and acceleration, s.
pub const ATTITUDE_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("invalid guidance configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("nadir frame undefined at t = {time} s: desired position is parallel to the spin axis")]
    NadirSingularity { time: f64 },
    #[error("desired position is zero at t = {time} s")]
    ZeroPosition { time: f64 },
}

/// How the phase-2 radial line is anchored to the asteroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseContinuity {
    /// Anchor on the asteroid-frame direction the phase-1 command points at
    /// when the phase switches, so `x_d` is continuous.
    #[default]
    Continuous,
    /// Anchor on the asteroid `f₁` axis regardless of where phase 1 ended.
    Literal,
}

/// Angular rate of the phase-1 traverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraverseRate {
    /// `ω = π / (2 t_d)`: a quarter turn, ending on inertial `e₁`.
    #[default]
    QuarterTurn,
    /// Choose `ω` so the traverse ends on the rotating `f₁` axis.
    AlignWithF1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    /// Traverse radius and phase-2 starting radius, m.
    pub initial_radius: f64,
    /// Phase switch time `t_d`, s.
    pub switch_time: f64,
    /// Signed asteroid-frame radial rate during phase 2, m/s.
    pub descent_rate: f64,
    pub continuity: PhaseContinuity,
    pub traverse: TraverseRate,
    /// Commanded radii below this are terminal, m.
    pub surface_radius: f64,
}

impl GuidanceConfig {
    /// Descends 2 km over `t_d`, continuous anchor, quarter-turn traverse.
    pub fn new(initial_radius: f64, switch_time: f64) -> Self {
        Self {
            initial_radius,
            switch_time,
            descent_rate: -2000.0 / switch_time,
            continuity: PhaseContinuity::Continuous,
            traverse: TraverseRate::QuarterTurn,
            surface_radius: 0.0,
        }
    }

    /// The profile exactly as written: the radius grows by 2 km over `t_d`
    /// along the asteroid `f₁` axis.
    pub fn literal(initial_radius: f64, switch_time: f64) -> Self {
        Self {
            descent_rate: 2000.0 / switch_time,
            continuity: PhaseContinuity::Literal,
            ..Self::new(initial_radius, switch_time)
        }
    }

    pub fn with_surface_radius(mut self, radius: f64) -> Self {
        self.surface_radius = radius;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Traverse,
    Descent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionCommand {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    /// Radial distance from the asteroid center, m.
    pub radius: f64,
}

/// Full tracking command at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryCommand {
    pub time: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub attitude: Matrix3<f64>,
    /// Body-frame desired angular velocity, rad/s.
    pub angular_velocity: Vector3<f64>,
    /// Body-frame desired angular acceleration, rad/s².
    pub angular_acceleration: Vector3<f64>,
    /// The commanded position lies inside the surface radius.
    pub below_surface: bool,
}

/// Anything that can be tracked by the controller.
pub trait CommandSource {
    fn command_at(&self, t: f64) -> Result<TrajectoryCommand, GuidanceError>;

    /// Time of a discontinuity in the command, if any.
    fn switch_time(&self) -> Option<f64> {
        None
    }
}

/// A constant pose with zero rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldCommand {
    pub position: Vector3<f64>,
    pub attitude: Matrix3<f64>,
}

impl CommandSource for HoldCommand {
    fn command_at(&self, t: f64) -> Result<TrajectoryCommand, GuidanceError> {
        Ok(TrajectoryCommand {
            time: t,
            position: self.position,
            velocity: Vector3::zeros(),
            acceleration: Vector3::zeros(),
            attitude: self.attitude,
            angular_velocity: Vector3::zeros(),
            angular_acceleration: Vector3::zeros(),
            below_surface: false,
        })
    }
}

/// `[b₁ b₂ b₃]` with `b₁ = -x̂` and `b₃` the part of `axis` orthogonal to `b₁`.
pub fn nadir_frame(position: &Vector3<f64>, axis: &Vector3<f64>) -> Option<Matrix3<f64>> {
    let r = position.norm();
    if !(r > 0.0) {
        return None;
    }
    let b1 = -position / r;
    let c = b1.dot(axis);
    if c.abs() > 1.0 - ALIGN_TOLERANCE {
        return None;
    }
    let b3 = (axis - b1 * c).normalize();
    let b2 = b3.cross(&b1);
    Some(Matrix3::from_columns(&[b1, b2, b3]))
}

/// `(R_d, Ω_d, Ω̇_d)`.
pub type AttitudeCommand = (Matrix3<f64>, Vector3<f64>, Vector3<f64>);

/// The landing profile bound to an asteroid rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandingGuidance {
    config: GuidanceConfig,
    rotation: AsteroidRotation,
    traverse_rate: f64,
    anchor: Vector3<f64>,
}

impl LandingGuidance {
    pub fn new(config: GuidanceConfig, rotation: AsteroidRotation) -> Result<Self, GuidanceError> {
        let GuidanceConfig {
            initial_radius: r0,
            switch_time: td,
            descent_rate,
            surface_radius,
            ..
        } = config;
        if !(td.is_finite() && td > 0.0) {
            return Err(GuidanceError::InvalidConfig("switch time must be positive"));
        }
        if !(r0.is_finite() && r0 > surface_radius && r0 > 0.0) {
            return Err(GuidanceError::InvalidConfig(
                "initial radius must exceed the body radius",
            ));
        }
        if !descent_rate.is_finite() || !(surface_radius >= 0.0) {
            return Err(GuidanceError::InvalidConfig("descent rate and surface radius must be finite"));
        }

        let quarter = core::f64::consts::FRAC_PI_2 / td;
        let traverse_rate = match config.traverse {
            TraverseRate::QuarterTurn => quarter,
            TraverseRate::AlignWithF1 => {
                let f1 = rotation.attitude(td) * Vector3::x();
                quarter + atan2(f1.y, f1.x) / td
            }
        };
        let mut g = Self {
            config,
            rotation,
            traverse_rate,
            anchor: Vector3::x(),
        };
        if config.continuity == PhaseContinuity::Continuous {
            let end = g.traverse(td).position;
            g.anchor = rotation.attitude(td).transpose() * end.normalize();
        }
        Ok(g)
    }

    pub fn config(&self) -> &GuidanceConfig {
        &self.config
    }

    /// Phase-1 angular rate, rad/s.
    pub fn traverse_rate(&self) -> f64 {
        self.traverse_rate
    }

    /// Asteroid-frame unit direction of the phase-2 radial line.
    pub fn anchor(&self) -> Vector3<f64> {
        self.anchor
    }

    pub fn phase(&self, t: f64) -> Phase {
        if t <= self.config.switch_time {
            Phase::Traverse
        } else {
            Phase::Descent
        }
    }

    pub fn desired_position(&self, t: f64) -> PositionCommand {
        self.position_in(self.phase(t), t)
    }

    /// `ẋ_d(t_d⁺) - ẋ_d(t_d⁻)`.
    pub fn velocity_jump(&self) -> Vector3<f64> {
        let td = self.config.switch_time;
        self.descent(td).velocity - self.traverse(td).velocity
    }

    /// `x_d(t_d⁺) - x_d(t_d⁻)`.
    pub fn position_jump(&self) -> Vector3<f64> {
        let td = self.config.switch_time;
        self.descent(td).position - self.traverse(td).position
    }

    /// Either phase's formula, evaluated at any `t`.
    pub fn position_in(&self, phase: Phase, t: f64) -> PositionCommand {
        match phase {
            Phase::Traverse => self.traverse(t),
            Phase::Descent => self.descent(t),
        }
    }

    fn traverse(&self, t: f64) -> PositionCommand {
        let r0 = self.config.initial_radius;
        let w = self.traverse_rate;
        let (s, c) = (sin(w * t), cos(w * t));
        PositionCommand {
            position: Vector3::new(s, -c, 0.0) * r0,
            velocity: Vector3::new(c, s, 0.0) * (r0 * w),
            acceleration: Vector3::new(-s, c, 0.0) * (r0 * w * w),
            radius: r0,
        }
    }

    fn descent(&self, t: f64) -> PositionCommand {
        let rho = self.config.initial_radius + self.config.descent_rate * (t - self.config.switch_time);
        let p = self.anchor * rho;
        let p_dot = self.anchor * self.config.descent_rate;
        let ra = self.rotation.attitude(t);
        let spin = so3::hat(&self.rotation.angular_velocity());
        let ra_dot = spin * ra;
        let ra_ddot = spin * ra_dot;
        PositionCommand {
            position: ra * p,
            velocity: ra_dot * p + ra * p_dot,
            acceleration: ra_ddot * p + ra_dot * p_dot * 2.0,
            radius: rho.abs(),
        }
    }

    fn attitude_in(&self, phase: Phase, t: f64) -> Result<Matrix3<f64>, GuidanceError> {
        let x = self.position_in(phase, t).position;
        if x.norm() == 0.0 {
            return Err(GuidanceError::ZeroPosition { time: t });
        }
        nadir_frame(&x, &self.rotation.spin_axis()).ok_or(GuidanceError::NadirSingularity { time: t })
    }

    /// `(R_d, Ω_d, Ω̇_d)`. Rates come from central differences of `R_d`
    /// using the formula of the phase `t` belongs to, so the stencil never
    /// straddles the switch.
    pub fn desired_attitude(&self, t: f64) -> Result<AttitudeCommand, GuidanceError> {
        let phase = self.phase(t);
        let h = ATTITUDE_STEP;
        let r = |k: f64| self.attitude_in(phase, t + k * h);
        let (rm2, rm1, r0, rp1, rp2) = (r(-2.0)?, r(-1.0)?, r(0.0)?, r(1.0)?, r(2.0)?);
        let rate = |center: &Matrix3<f64>, ahead: &Matrix3<f64>, behind: &Matrix3<f64>| {
            so3::skew_vee(&(center.transpose() * (ahead - behind))) / (2.0 * h)
        };
        let omega = rate(&r0, &rp1, &rm1);
        let omega_dot = (rate(&rp1, &rp2, &r0) - rate(&rm1, &r0, &rm2)) / (2.0 * h);
        Ok((r0, omega, omega_dot))
    }
}

impl CommandSource for LandingGuidance {
    fn command_at(&self, t: f64) -> Result<TrajectoryCommand, GuidanceError> {
        let p = self.desired_position(t);
        let (attitude, angular_velocity, angular_acceleration) = self.desired_attitude(t)?;
        Ok(TrajectoryCommand {
            time: t,
            position: p.position,
            velocity: p.velocity,
            acceleration: p.acceleration,
            attitude,
            angular_velocity,
            angular_acceleration,
            below_surface: p.radius < self.config.surface_radius,
        })
    }

    fn switch_time(&self) -> Option<f64> {
        Some(self.config.switch_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    const PERIOD: f64 = 12.1 * 3600.0;

    fn landing(config: GuidanceConfig) -> LandingGuidance {
        LandingGuidance::new(config, AsteroidRotation::from_period(PERIOD)).unwrap()
    }

    #[test]
    fn traverse_endpoints() {
        let g = landing(GuidanceConfig::new(2550.0, 3600.0));
        assert!((g.desired_position(0.0).position - Vector3::new(0.0, -2550.0, 0.0)).norm() < 1e-12);
        assert!((g.desired_position(3600.0).position - Vector3::new(2550.0, 0.0, 0.0)).norm() < 1e-9);
        assert_eq!(g.phase(3600.0), Phase::Traverse);
        assert_eq!(g.phase(3600.0 + 1e-9), Phase::Descent);
    }

    #[test]
    fn descent_follows_the_rotating_frame() {
        // A quarter turn of the asteroid maps the f₁ radial line onto e₂.
        let mut cfg = GuidanceConfig::literal(2550.0, 100.0);
        cfg.descent_rate = -550.0 / 100.0;
        let rot = AsteroidRotation::new(PI / 2.0 / 200.0, Matrix3::identity());
        let g = LandingGuidance::new(cfg, rot).unwrap();
        let x = g.desired_position(200.0).position;
        assert!((x - Vector3::new(0.0, 2000.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn continuous_mode_has_no_position_jump() {
        let g = landing(GuidanceConfig::new(2550.0, 3600.0));
        assert!(g.position_jump().norm() < 1e-9);
        let lit = landing(GuidanceConfig::literal(2550.0, 3600.0));
        // The asteroid turns ≈29.75° during the traverse.
        let expected = 2.0 * 2550.0 * sin(2.0 * PI * 3600.0 / PERIOD / 2.0);
        assert!((lit.position_jump().norm() - expected).abs() < 1e-6);
    }

    #[test]
    fn align_with_f1_closes_the_gap_in_literal_mode() {
        let mut cfg = GuidanceConfig::literal(2550.0, 3600.0);
        cfg.traverse = TraverseRate::AlignWithF1;
        assert!(landing(cfg).position_jump().norm() < 1e-9);
    }

    #[test]
    fn nadir_frames() {
        let r = nadir_frame(&Vector3::new(0.0, -2550.0, 0.0), &Vector3::z()).unwrap();
        assert_eq!(r.column(0), Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(r.column(1), Vector3::new(-1.0, 0.0, 0.0));
        assert_eq!(r.column(2), Vector3::new(0.0, 0.0, 1.0));
        assert!((r - so3::exp(&(Vector3::z() * (PI / 2.0)))).norm() < 1e-15);

        let r = nadir_frame(&Vector3::x(), &Vector3::z()).unwrap();
        assert_eq!(r.column(0), -Vector3::x());
        assert_eq!(r.column(2), Vector3::z());
        assert!(nadir_frame(&(Vector3::z() * 5.0), &Vector3::z()).is_none());
        assert!(nadir_frame(&Vector3::zeros(), &Vector3::z()).is_none());
    }

    #[test]
    fn nadir_singularity_is_reported() {
        let cfg = GuidanceConfig::new(2550.0, 3600.0);
        let g = LandingGuidance {
            anchor: Vector3::z(),
            ..landing(cfg)
        };
        assert_eq!(
            g.command_at(4000.0),
            Err(GuidanceError::NadirSingularity { time: 4000.0 - 2.0 * ATTITUDE_STEP })
        );
    }

    #[test]
    fn traverse_attitude_rate_is_about_e3() {
        let g = landing(GuidanceConfig::new(2550.0, 3600.0));
        let (_, w, wd) = g.desired_attitude(1000.0).unwrap();
        assert!((w - Vector3::z() * g.traverse_rate()).norm() < 1e-12);
        assert!(wd.norm() < 1e-10);
    }

    #[test]
    fn below_surface_flag() {
        let cfg = GuidanceConfig::new(2550.0, 3600.0).with_surface_radius(600.0);
        let g = landing(cfg);
        assert!(!g.command_at(3600.0 + 3500.0).unwrap().below_surface);
        assert!(g.command_at(7200.0).unwrap().below_surface);
    }

    #[test]
    fn rejects_bad_config() {
        let rot = AsteroidRotation::fixed();
        assert!(LandingGuidance::new(GuidanceConfig::new(2550.0, 0.0), rot).is_err());
        let low = GuidanceConfig::new(100.0, 10.0).with_surface_radius(200.0);
        assert!(LandingGuidance::new(low, rot).is_err());
    }
}
