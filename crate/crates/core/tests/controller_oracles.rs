mod common;

use common::*;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbdyn_core::controller::{
    attitude_error, compute_control, select_gains, tracking_errors, ControlGains, SecondOrderSpec,
};
use sbdyn_core::gravity::GravityModel;
use sbdyn_core::guidance::TrajectoryCommand;
use sbdyn_core::rigid_body::{so3, AsteroidModel, AsteroidRotation, DumbbellParams, Dynamics, SpacecraftState};
use sbdyn_core::shape_model::primitives;

fn random_vec<R: Rng>(rng: &mut R, scale: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
}

fn random_case<R: Rng>(rng: &mut R) -> (SpacecraftState, TrajectoryCommand) {
    let state = SpacecraftState {
        position: random_shell_point(rng, 2.0, 5.0),
        velocity: random_vec(rng, 1.0),
        attitude: random_rotation(rng),
        angular_velocity: random_vec(rng, 0.5),
        time: rng.gen_range(0.0..10.0),
    };
    let command = TrajectoryCommand {
        time: state.time,
        position: random_shell_point(rng, 2.0, 5.0),
        velocity: random_vec(rng, 1.0),
        acceleration: random_vec(rng, 0.1),
        attitude: random_rotation(rng),
        angular_velocity: random_vec(rng, 0.5),
        angular_acceleration: random_vec(rng, 0.1),
        below_surface: false,
    };
    (state, command)
}

fn dynamics() -> Dynamics {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::new(0.2, Matrix3::identity())),
        DumbbellParams::new(1.5, 2.5, 0.8, 0.2).unwrap(),
    )
}

#[test]
fn control_laws_cancel_the_dynamics() {
    let d = dynamics();
    let gains = ControlGains::new(3.0, 7.0, 5.0, 11.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let (s, c) = random_case(&mut rng);
        let (rot, trans) = closed_loop_residuals(&d, &gains, &s, &c);
        assert!(rot.amax() < 1e-10, "{rot:?}");
        assert!(trans.amax() < 1e-10, "{trans:?}");
    }
}

#[test]
fn hover_with_zero_errors_cancels_gravity() {
    let d = dynamics();
    let gains = select_gains(&d.spacecraft, &SecondOrderSpec::DEFAULT_TRANSLATIONAL, &SecondOrderSpec::DEFAULT_ROTATIONAL)
        .unwrap();
    let s = SpacecraftState {
        position: Vector3::new(3.0, 1.0, -0.5),
        velocity: Vector3::zeros(),
        attitude: so3::exp(&Vector3::new(0.1, 0.5, -0.2)),
        angular_velocity: Vector3::zeros(),
        time: 0.0,
    };
    let c = TrajectoryCommand {
        time: 0.0,
        position: s.position,
        velocity: Vector3::zeros(),
        acceleration: Vector3::zeros(),
        attitude: s.attitude,
        angular_velocity: Vector3::zeros(),
        angular_acceleration: Vector3::zeros(),
        below_surface: false,
    };
    let gravity = d.gravity_wrench(&s).unwrap();
    let (w, _) = compute_control(&s, &c, &gains, &d.spacecraft, &gravity).unwrap();
    assert_eq!(w.force, -gravity.forces[0] - gravity.forces[1]);
    let deriv = d.derivative_with(&s, &gravity, &w).unwrap();
    assert!(deriv.acceleration.norm() < 1e-16);
    assert!(deriv.angular_acceleration.norm() < 1e-16);
}

#[test]
fn errors_are_invariant_under_a_common_left_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let (s, c) = random_case(&mut rng);
        let q = random_rotation(&mut rng);
        let e = tracking_errors(&s, &c).unwrap();
        let s2 = SpacecraftState {
            attitude: q * s.attitude,
            ..s
        };
        let c2 = TrajectoryCommand {
            attitude: q * c.attitude,
            ..c
        };
        let e2 = tracking_errors(&s2, &c2).unwrap();
        assert!((e.psi - e2.psi).abs() < 1e-14);
        assert!((e.attitude - e2.attitude).norm() < 1e-14);
        assert!((e.angular_velocity - e2.angular_velocity).norm() < 1e-14);
    }
}

#[test]
fn control_is_smooth_along_state_paths() {
    // Second differences along a smooth path shrink as h², with no jumps.
    let d = dynamics();
    let gains = ControlGains::new(3.0, 7.0, 5.0, 11.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let (s, c) = random_case(&mut rng);
        let dx = random_vec(&mut rng, 1.0);
        let dth = random_vec(&mut rng, 1.0);
        let at = |tau: f64| {
            let p = SpacecraftState {
                position: s.position + dx * tau,
                attitude: s.attitude * so3::exp(&(dth * tau)),
                angular_velocity: s.angular_velocity + dth * tau,
                ..s
            };
            let g = d.gravity_wrench(&p).unwrap();
            let (w, _) = compute_control(&p, &c, &gains, &d.spacecraft, &g).unwrap();
            (w.force, w.moment)
        };
        let second = |h: f64| {
            let (a, b, c) = (at(-h), at(0.0), at(h));
            ((a.0 - b.0 * 2.0 + c.0).norm(), (a.1 - b.1 * 2.0 + c.1).norm())
        };
        let (f1, m1) = second(1e-2);
        let (f2, m2) = second(5e-3);
        assert!(f2 < 0.3 * f1.max(1e-12) + 1e-12);
        assert!(m2 < 0.3 * m1.max(1e-12) + 1e-12);
    }
}

proptest! {
    #[test]
    fn single_axis_offsets(ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in -1.0..1.0f64, theta in -3.1..3.1f64) {
        let n = Vector3::new(ax, ay, az);
        prop_assume!(n.norm() > 1e-3);
        let n = n.normalize();
        let rd = so3::exp(&Vector3::new(0.4, -0.1, 2.0));
        let r = rd * so3::exp(&(n * theta));
        let (psi, e) = attitude_error(&r, &rd).unwrap();
        prop_assert!((psi - (1.0 - theta.cos())).abs() < 1e-14);
        prop_assert!((e.norm() - theta.sin().abs()).abs() < 1e-14);
        prop_assert!((0.0..=2.0).contains(&psi));
    }
}
