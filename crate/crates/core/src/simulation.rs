//! Fixed-step closed-loop simulation: command, control, then dynamics.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::controller::{compute_control, fastest_closed_loop_rate, tracking_errors, ControlGains, ErrorState};
use crate::guidance::{CommandSource, TrajectoryCommand};
use crate::rigid_body::{so3, step, Dynamics, DynamicsError, GravityWrench, SpacecraftState, StepOutcome, WrenchInput};

/// Largest `|λ| h` allowed for any closed-loop pole within one control update.
pub const MAX_POLE_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("final time must be non-negative and finite, got {0}")]
    InvalidDuration(f64),
    #[error("initial state is not finite or its attitude is not a rotation")]
    InvalidInitialState,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    Completed,
    Collision,
    CommandBelowSurface,
    NumericalAbort,
}

impl TerminationReason {
    pub const ALL: [Self; 4] = [
        Self::Completed,
        Self::Collision,
        Self::CommandBelowSurface,
        Self::NumericalAbort,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Completed => "completed",
            Self::Collision => "collision",
            Self::CommandBelowSurface => "command-below-surface",
            Self::NumericalAbort => "numerical-abort",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

/// One row of the trajectory log, taken before the step from `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    /// Row-major `R`.
    pub attitude: [f64; 9],
    pub angular_velocity: [f64; 3],
    pub desired_position: [f64; 3],
    pub psi: f64,
    pub position_error: [f64; 3],
    pub velocity_error: [f64; 3],
    pub attitude_error: [f64; 3],
    pub angular_velocity_error: [f64; 3],
    pub control_force: [f64; 3],
    pub control_moment: [f64; 3],
    /// Smallest distance from either mass to a mesh vertex, m.
    pub altitude: f64,
    /// `-Σ m_i U(z_i)`, J.
    pub potential_energy: f64,
    /// Total gravitational force, inertial, N.
    pub gravity_force: [f64; 3],
}

impl StepRecord {
    pub fn attitude_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_row_slice(&self.attitude)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub termination: TerminationReason,
    /// Error message behind a non-completed termination.
    pub detail: Option<String>,
    /// Time of the last integrated state (after truncation on contact), s.
    pub end_time: f64,
    pub final_position_error: f64,
    pub final_velocity_error: f64,
    pub final_psi: f64,
    pub final_attitude_error: f64,
    pub final_angular_velocity_error: f64,
    /// `∫‖u_f‖ dt`, N s.
    pub control_force_integral: f64,
    /// `∫‖u_m‖ dt`, N m s.
    pub control_moment_integral: f64,
    /// Index `k` of the last record with `t_k ≤ t_d`, when the run passes `t_d`.
    pub phase_switch_index: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
}

pub struct Scenario<C> {
    pub dynamics: Dynamics,
    pub command: C,
    /// `None` flies open loop with zero control.
    pub gains: Option<ControlGains>,
    pub initial: SpacecraftState,
    pub dt: f64,
    pub t_final: f64,
    /// Carried into the summary; the loop itself draws no random numbers.
    pub seed: Option<u64>,
}

fn arr(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn row_major(m: &Matrix3<f64>) -> [f64; 9] {
    let mut out = [0.0; 9];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[(i / 3, i % 3)];
    }
    out
}

fn switch_index(switch: Option<f64>, dt: f64) -> Option<usize> {
    let td = switch?;
    if !(td >= 0.0) {
        return None;
    }
    let mut k = (td / dt) as usize;
    while (k + 1) as f64 * dt <= td {
        k += 1;
    }
    while k > 0 && k as f64 * dt > td {
        k -= 1;
    }
    Some(k)
}

struct Evaluation {
    command: TrajectoryCommand,
    gravity: GravityWrench,
    wrench: WrenchInput,
    errors: ErrorState,
}

type Stop = (TerminationReason, String);

impl<C: CommandSource> Scenario<C> {
    fn validate(&self) -> Result<u64, SimulationError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimulationError::InvalidStep(self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(SimulationError::InvalidDuration(self.t_final));
        }
        if !self.initial.is_finite() || so3::orthogonality_error(&self.initial.attitude) > 1e-6 {
            return Err(SimulationError::InvalidInitialState);
        }
        Ok(libm::round(self.t_final / self.dt) as u64)
    }

    /// Control updates per logged step: enough that every closed-loop pole
    /// satisfies `|λ| dt / m ≤ MAX_POLE_STEP`. Always 1 in open loop.
    pub fn control_substeps(&self) -> u32 {
        let Some(gains) = &self.gains else { return 1 };
        let rate = fastest_closed_loop_rate(gains, &self.dynamics.spacecraft);
        let m = libm::ceil(self.dt * rate / MAX_POLE_STEP);
        if m.is_finite() && m > 1.0 {
            m.min(u32::MAX as f64) as u32
        } else {
            1
        }
    }

    fn evaluate(&self, state: &SpacecraftState) -> Result<Evaluation, Stop> {
        let abort = |e: &dyn core::fmt::Display| (TerminationReason::NumericalAbort, e.to_string());
        let command = self.command.command_at(state.time).map_err(|e| abort(&e))?;
        let gravity = self.dynamics.gravity_wrench(state).map_err(|e| match e {
            DynamicsError::Collision { .. } => (TerminationReason::Collision, e.to_string()),
            _ => abort(&e),
        })?;
        let control = match &self.gains {
            Some(gains) => compute_control(state, &command, gains, &self.dynamics.spacecraft, &gravity),
            None => tracking_errors(state, &command).map(|e| (WrenchInput::ZERO, e)),
        };
        match control {
            Ok((wrench, errors)) if wrench.is_finite() => Ok(Evaluation {
                command,
                gravity,
                wrench,
                errors,
            }),
            Ok(_) => Err(abort(&"non-finite control wrench")),
            Err(e) => Err(abort(&e)),
        }
    }

    /// Run from `t = 0` to `t_final`, logging on the grid `t_k = k dt`.
    ///
    /// Each logged step is split into [`Self::control_substeps`] equal
    /// sub-steps; the wrench is recomputed at the start of each and held
    /// over it.
    pub fn run(&self) -> Result<TrajectoryLog, SimulationError> {
        let n = self.validate()?;
        let dt = self.dt;
        let m = self.control_substeps();
        let h = dt / m as f64;
        let params = &self.dynamics.spacecraft;
        let mesh = self.dynamics.asteroid.body.mesh();
        let masses = params.masses();

        let mut records = Vec::with_capacity(n as usize + 1);
        let mut state = self.initial;
        let mut last_errors: Option<ErrorState> = None;
        let mut force_integral = 0.0;
        let mut moment_integral = 0.0;
        let mut end_time;

        let mut k: u64 = 0;
        let (termination, detail) = 'run: loop {
            let t = k as f64 * dt;
            state.time = t;
            end_time = t;

            let eval = match self.evaluate(&state) {
                Ok(e) => e,
                Err((reason, why)) => break (reason, Some(why)),
            };
            let altitude = self
                .dynamics
                .mass_positions(&state)
                .iter()
                .map(|z| mesh.distance_to_nearest_vertex(z))
                .fold(f64::INFINITY, f64::min);
            let (command, gravity, errors) = (&eval.command, &eval.gravity, &eval.errors);
            records.push(StepRecord {
                time: t,
                position: arr(&state.position),
                velocity: arr(&state.velocity),
                attitude: row_major(&state.attitude),
                angular_velocity: arr(&state.angular_velocity),
                desired_position: arr(&command.position),
                psi: errors.psi,
                position_error: arr(&errors.position),
                velocity_error: arr(&errors.velocity),
                attitude_error: arr(&errors.attitude),
                angular_velocity_error: arr(&errors.angular_velocity),
                control_force: arr(&eval.wrench.force),
                control_moment: arr(&eval.wrench.moment),
                altitude,
                potential_energy: -(masses[0] * gravity.fields[0].potential + masses[1] * gravity.fields[1].potential),
                gravity_force: arr(&gravity.total_force()),
            });
            last_errors = Some(eval.errors);

            if eval.command.below_surface {
                break (
                    TerminationReason::CommandBelowSurface,
                    Some("commanded position is below the surface radius".to_string()),
                );
            }
            if k == n {
                break (TerminationReason::Completed, None);
            }

            let mut wrench = eval.wrench;
            for j in 0..m {
                if j > 0 {
                    state.time = t + j as f64 * h;
                    wrench = match self.evaluate(&state) {
                        Ok(e) => e.wrench,
                        Err((reason, why)) => {
                            end_time = state.time;
                            break 'run (reason, Some(why));
                        }
                    };
                }
                let outcome = step(&state, h, |s| {
                    self.dynamics.derivative_with(s, &self.dynamics.gravity_wrench(s)?, &wrench)
                });
                match outcome {
                    Ok(StepOutcome::Advanced(next)) => {
                        force_integral += wrench.force.norm() * h;
                        moment_integral += wrench.moment.norm() * h;
                        state = next;
                    }
                    Ok(StepOutcome::Terminated { state: last, cause }) => {
                        let partial = last.time - state.time;
                        force_integral += wrench.force.norm() * partial;
                        moment_integral += wrench.moment.norm() * partial;
                        end_time = last.time;
                        break 'run (TerminationReason::Collision, Some(cause.to_string()));
                    }
                    Err(e) => {
                        end_time = state.time;
                        break 'run (TerminationReason::NumericalAbort, Some(e.to_string()));
                    }
                }
            }
            k += 1;
        };

        let e = last_errors;
        let norm = |f: fn(&ErrorState) -> f64| e.as_ref().map_or(f64::NAN, f);
        let phase_switch_index = switch_index(self.command.switch_time(), dt).filter(|&k| k + 1 < records.len());
        let summary = RunSummary {
            termination,
            detail,
            end_time,
            final_position_error: norm(|e| e.position.norm()),
            final_velocity_error: norm(|e| e.velocity.norm()),
            final_psi: norm(|e| e.psi),
            final_attitude_error: norm(|e| e.attitude.norm()),
            final_angular_velocity_error: norm(|e| e.angular_velocity.norm()),
            control_force_integral: force_integral,
            control_moment_integral: moment_integral,
            phase_switch_index,
            seed: self.seed,
        };
        Ok(TrajectoryLog { records, summary })
    }
}
