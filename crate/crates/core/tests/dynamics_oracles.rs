mod common;

use common::*;
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbdyn_core::gravity::GravityModel;
use sbdyn_core::rigid_body::{
    so3, step, AsteroidModel, AsteroidRotation, DumbbellParams, Dynamics, MomentConvention, SpacecraftState,
    StepOutcome, WrenchInput,
};
use sbdyn_core::shape_model::primitives;
use sbdyn_core::GRAVITATIONAL_CONSTANT;

fn propagate(d: &Dynamics, mut s: SpacecraftState, dt: f64, steps: usize) -> SpacecraftState {
    for _ in 0..steps {
        s = match step(&s, dt, |x| d.derivative(x, &WrenchInput::ZERO)).unwrap() {
            StepOutcome::Advanced(next) => next,
            other => panic!("unexpected termination: {other:?}"),
        };
    }
    s
}

fn state_distance(a: &SpacecraftState, b: &SpacecraftState) -> f64 {
    (a.position - b.position).norm()
        + (a.velocity - b.velocity).norm()
        + (a.attitude - b.attitude).norm()
        + (a.angular_velocity - b.angular_velocity).norm()
}

fn circular_start(mu: f64, radius: f64) -> SpacecraftState {
    SpacecraftState {
        position: Vector3::new(radius, 0.0, 0.0),
        velocity: Vector3::new(0.0, 0.9, 0.3).normalize() * (mu / radius).sqrt(),
        attitude: so3::exp(&Vector3::new(0.2, -0.4, 0.9)),
        angular_velocity: Vector3::new(0.01, -0.02, 0.015),
        time: 0.0,
    }
}

#[test]
fn energy_is_conserved_about_a_fixed_cube() {
    let body = GravityModel::from_mesh(&primitives::cube(1000.0), GRAVITATIONAL_CONSTANT, 2000.0).unwrap();
    let mu = body.gravitational_parameter();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::fixed()),
        DumbbellParams::new(500.0, 500.0, 3.0, 0.5).unwrap(),
    );
    let s0 = circular_start(mu, 3000.0);
    let e0 = d.total_energy(&s0).unwrap();
    let s1 = propagate(&d, s0, 1.0, 1000);
    let e1 = d.total_energy(&s1).unwrap();
    assert!(((e1 - e0) / e0).abs() < 1e-6, "{e0} -> {e1}");
    // Exercised the potential: the orbit moved noticeably.
    assert!((s1.position - s0.position).norm() > 100.0);
}

#[test]
fn integrator_converges_at_fourth_order() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::fixed()),
        DumbbellParams::new(1.0, 2.0, 0.4, 0.1).unwrap(),
    );
    let mut s0 = circular_start(1.0, 2.0);
    s0.angular_velocity = Vector3::new(0.4, -0.3, 0.6);
    let t = 4.0;
    let reference = propagate(&d, s0, 0.025, 160);
    let errors: Vec<f64> = [0.2, 0.1]
        .iter()
        .map(|&dt| state_distance(&propagate(&d, s0, dt, (t / dt) as usize), &reference))
        .collect();
    let order = (errors[0] / errors[1]).log2();
    assert!(order >= 3.5, "observed order {order}, errors {errors:?}");
}

#[test]
fn attitude_stays_on_so3_for_1e5_steps() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::fixed()).without_gravity(),
        DumbbellParams::new(1.0, 2.0, 0.4, 0.1).unwrap(),
    );
    let s0 = SpacecraftState {
        position: Vector3::zeros(),
        velocity: Vector3::zeros(),
        attitude: so3::exp(&Vector3::new(1.0, 2.0, -0.5)),
        angular_velocity: Vector3::new(0.7, -1.3, 0.4),
        time: 0.0,
    };
    let s = propagate(&d, s0, 0.01, 100_000);
    let err = so3::orthogonality_error(&s.attitude);
    assert!(err < 1e-9, "{err}");
    assert!((s.attitude.determinant() - 1.0).abs() < 1e-9);
    // Torque-free: the inertial angular momentum is fixed.
    let h0 = d.angular_momentum(&s0);
    assert!((d.angular_momentum(&s) - h0).norm() / h0.norm() < 1e-8);
}

#[test]
fn coasting_without_gravity_keeps_momentum() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::fixed()).without_gravity(),
        DumbbellParams::new(1.0, 2.0, 0.4, 0.1).unwrap(),
    );
    let s0 = circular_start(1.0, 2.0);
    let s = propagate(&d, s0, 0.1, 500);
    assert_eq!(s.velocity, s0.velocity);
}

#[test]
fn rotating_frame_energy_is_conserved() {
    let body = GravityModel::from_mesh(&primitives::itokawa_like(), GRAVITATIONAL_CONSTANT, 1900.0).unwrap();
    let mu = body.gravitational_parameter();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::from_period(12.1 * 3600.0)),
        DumbbellParams::new(500.0, 500.0, 3.0, 0.5).unwrap(),
    );
    let s0 = circular_start(mu, 2550.0);
    let e0 = d.rotating_frame_energy(&s0).unwrap();
    let s1 = propagate(&d, s0, 1.0, 3600);
    let e1 = d.rotating_frame_energy(&s1).unwrap();
    assert!(((e1 - e0) / e0).abs() < 1e-5, "{e0} -> {e1}");
}

/// The body-frame gravity moment is minus the derivative of the potential
/// energy along right perturbations `R exp(ε ê_k)`.
#[test]
fn gravity_moment_is_the_attitude_gradient_of_potential_energy() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::new(0.3, Matrix3::identity())),
        DumbbellParams::new(1.0, 3.0, 0.8, 0.1).unwrap(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let s = SpacecraftState {
            position: random_shell_point(&mut rng, 2.0, 4.0),
            velocity: Vector3::zeros(),
            attitude: random_rotation(&mut rng),
            angular_velocity: Vector3::zeros(),
            time: 1.7,
        };
        let moment = d.gravity_wrench(&s).unwrap().total_moment();
        let v = |eps: &Vector3<f64>| {
            let perturbed = SpacecraftState {
                attitude: s.attitude * so3::exp(eps),
                ..s
            };
            d.potential_energy(&perturbed).unwrap()
        };
        let fd = -fd_gradient(v, &Vector3::zeros(), 1e-5);
        assert!((moment - fd).norm() / moment.norm() < 1e-6, "{moment:?} vs {fd:?}");
    }
}

#[test]
fn radially_aligned_dumbbell_moment() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let params = DumbbellParams::new(2.0, 2.0, 0.6, 0.1).unwrap();
    let d = Dynamics::new(AsteroidModel::new(body.clone(), AsteroidRotation::fixed()), params.clone());
    let dir = Vector3::new(0.3, 0.8, 0.52).normalize();
    let radius = 10.0 * primitives::cube(1.0).max_vertex_radius();
    // Body b₁ along the radial direction.
    let b3 = dir.cross(&Vector3::z()).normalize();
    let attitude = Matrix3::from_columns(&[dir, b3.cross(&dir), b3]);
    let s = SpacecraftState {
        position: dir * radius,
        velocity: Vector3::zeros(),
        attitude,
        angular_velocity: Vector3::zeros(),
        time: 0.0,
    };
    let moment = d.gravity_wrench(&s).unwrap().total_moment();

    // Two explicit point masses, each field evaluated on its own.
    let mut expected = Vector3::zeros();
    for (m, rho) in params.masses().iter().zip(params.offsets()) {
        let z = s.position + attitude * rho;
        let f = body.evaluate(&z).unwrap().attraction * *m;
        expected += rho.cross(&(attitude.transpose() * f));
    }
    assert!((moment - expected).norm() / expected.norm() < 1e-6);
    // The arm is radial in the body frame, so the moment has no b₁ part.
    assert!(moment.x.abs() < 1e-12 * moment.norm());
}

#[test]
fn moment_conventions_differ_only_in_a_rotated_asteroid() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let mut d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::new(1.0, Matrix3::identity())),
        DumbbellParams::new(1.0, 3.0, 0.8, 0.1).unwrap(),
    );
    let moments = |d: &mut Dynamics, s: &SpacecraftState| {
        d.moment_convention = MomentConvention::BodyFrame;
        let body = d.gravity_wrench(s).unwrap().total_moment();
        d.moment_convention = MomentConvention::Literal;
        let literal = d.gravity_wrench(s).unwrap().total_moment();
        (body, literal)
    };
    let mut s = SpacecraftState {
        position: Vector3::new(2.1, -1.3, 0.7),
        velocity: Vector3::zeros(),
        attitude: so3::exp(&Vector3::new(0.3, 0.2, 1.0)),
        angular_velocity: Vector3::zeros(),
        time: 0.0,
    };
    let (a, b) = moments(&mut d, &s);
    assert!((a - b).norm() < 1e-13 * a.norm());
    s.time = 0.5;
    let (a, b) = moments(&mut d, &s);
    assert!((a - b).norm() > 1e-3 * a.norm());
}

#[test]
fn derivative_is_bitwise_deterministic() {
    let body = GravityModel::from_mesh(&primitives::itokawa_like(), GRAVITATIONAL_CONSTANT, 1900.0).unwrap();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::from_period(43560.0)),
        DumbbellParams::new(500.0, 500.0, 3.0, 0.5).unwrap(),
    );
    let s = circular_start(2.0, 2550.0);
    let w = WrenchInput {
        force: Vector3::new(0.1, 0.2, 0.3),
        moment: Vector3::new(-0.1, 0.0, 0.4),
    };
    let a = d.derivative(&s, &w).unwrap();
    for _ in 0..5 {
        assert_eq!(d.derivative(&s, &w).unwrap(), a);
    }
}

#[test]
fn mass_positions_in_a_quarter_turned_asteroid() {
    let body = GravityModel::from_mesh(&primitives::cube(1.0), 1.0, 1.0).unwrap();
    let d = Dynamics::new(
        AsteroidModel::new(body, AsteroidRotation::new(std::f64::consts::FRAC_PI_2, Matrix3::identity())),
        DumbbellParams::new(1.0, 1.0, 0.0, 0.1).unwrap(),
    );
    let s = SpacecraftState {
        position: Vector3::new(1.0, 2.0, 3.0),
        velocity: Vector3::zeros(),
        attitude: Matrix3::identity(),
        angular_velocity: Vector3::zeros(),
        time: 1.0,
    };
    for z in d.mass_positions(&s) {
        assert!((z - Vector3::new(2.0, -1.0, 3.0)).norm() < 1e-15);
    }
}
