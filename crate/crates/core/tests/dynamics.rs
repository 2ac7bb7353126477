use mppi_dock::vessel::{
    dynamics_derivative, rotation_matrix, step, thrust_to_wrench, ThrustCommand, VesselParams, VesselState, Wrench,
};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn integrate(mut s: VesselState, cmd: &ThrustCommand, dt: f64, n: usize, p: &VesselParams) -> VesselState {
    for _ in 0..n {
        s = step(&s, cmd, dt, p).unwrap();
    }
    s
}

fn state_error(a: &VesselState, b: &VesselState) -> f64 {
    [a.x - b.x, a.y - b.y, a.psi - b.psi, a.u - b.u, a.v - b.v, a.r - b.r]
        .iter()
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt()
}

#[test]
fn rotation_is_orthonormal_for_random_headings() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let psi = rng.random_range(-10.0..10.0);
        let j = rotation_matrix(psi);
        assert!((j * j.transpose() - Matrix3::identity()).abs().max() < 1e-12);
        assert!((j.determinant() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn coriolis_does_no_work() {
    let p = VesselParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let nu = Vector3::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-2.0..2.0),
        );
        let work = nu.dot(&(p.coriolis(&nu) * nu));
        assert!(work.abs() < 1e-12, "{work}");
    }
}

#[test]
fn rest_is_an_exact_fixed_point() {
    let p = VesselParams::default();
    let s = VesselState::at_rest(3.0, -2.0, 1.1);
    for dt in [0.01, 0.05, 0.5] {
        assert_eq!(step(&s, &ThrustCommand::ZERO, dt, &p).unwrap(), s);
    }
}

#[test]
fn damping_slows_a_coasting_hull_like_a_fine_reference() {
    let p = VesselParams::default();
    let s = VesselState::new(0.0, 0.0, 0.0, 0.3, 0.0, 0.0);
    let coarse = step(&s, &ThrustCommand::ZERO, 0.05, &p).unwrap();
    let fine = integrate(s, &ThrustCommand::ZERO, 0.0005, 100, &p);
    assert!(coarse.speed() < 0.3);
    assert!(state_error(&coarse, &fine) < 1e-9);
    // pure surge decay has the closed form u0 exp(-N11/M11 t)
    assert!((coarse.u - 0.3 * (-8.0f64 / 25.0 * 0.05).exp()).abs() < 1e-9);
}

#[test]
fn rk4_converges_at_fourth_order() {
    let p = VesselParams::default();
    let s0 = VesselState::new(0.0, 0.0, 0.3, 0.6, -0.2, 0.4);
    let cmd = ThrustCommand([12.0, -5.0, 7.0, 3.0]);
    let horizon = 2.0;
    let reference = integrate(s0, &cmd, 0.1 / 64.0, (horizon / (0.1 / 64.0)) as usize, &p);
    let dts = [0.1, 0.05, 0.025];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            state_error(
                &integrate(s0, &cmd, dt, (horizon / dt).round() as usize, &p),
                &reference,
            )
        })
        .collect();
    let slope = ((errs[0] / errs[2]).ln()) / ((dts[0] / dts[2]).ln());
    assert!((slope - 4.0).abs() < 0.3, "slope {slope}, errors {errs:?}");
}

#[test]
fn step_is_bit_reproducible() {
    let p = VesselParams::default();
    let s = VesselState::new(1.0, 2.0, 0.3, 0.2, 0.1, -0.05);
    let cmd = ThrustCommand([3.0, -1.0, 4.0, 1.5]);
    assert_eq!(step(&s, &cmd, 0.05, &p).unwrap(), step(&s, &cmd, 0.05, &p).unwrap());
}

#[test]
fn longitudinal_pair_gives_pure_surge() {
    let p = VesselParams::default();
    let w = thrust_to_wrench(&ThrustCommand([5.0, 5.0, 0.0, 0.0]), &p);
    assert!(w.fx > 0.0 && w.fy == 0.0 && w.mz == 0.0);
}

#[test]
fn blowup_is_reported() {
    let p = VesselParams::default();
    let s = VesselState::new(0.0, 0.0, 0.0, 1e200, 1e200, 1e200);
    assert!(step(&s, &ThrustCommand::ZERO, 0.05, &p).is_err());
}

fn arb_state() -> impl Strategy<Value = VesselState> {
    (
        -20.0..20.0f64,
        -20.0..20.0f64,
        -4.0..4.0f64,
        -1.5..1.5f64,
        -1.5..1.5f64,
        -1.0..1.0f64,
    )
        .prop_map(|(x, y, psi, u, v, r)| VesselState::new(x, y, psi, u, v, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn kinetic_energy_never_grows_without_thrust(s in arb_state()) {
        let p = VesselParams::default();
        let mut s = s;
        let mut e = p.kinetic_energy(&s);
        for _ in 0..200 {
            s = step(&s, &ThrustCommand::ZERO, 0.05, &p).unwrap();
            let next = p.kinetic_energy(&s);
            prop_assert!(next <= e + 1e-9);
            e = next;
        }
    }

    #[test]
    fn heading_stays_normalized(s in arb_state(), t in prop::array::uniform4(-20.0..20.0f64)) {
        let p = VesselParams::default();
        let n = step(&s, &ThrustCommand(t), 0.05, &p).unwrap();
        prop_assert!(n.psi > -std::f64::consts::PI && n.psi <= std::f64::consts::PI);
        prop_assert!(n.is_finite());
    }

    #[test]
    fn wrench_is_linear_in_thrust(t in prop::array::uniform4(-10.0..10.0f64), k in -2.0..2.0f64) {
        let p = VesselParams::default();
        let a = thrust_to_wrench(&ThrustCommand(t), &p);
        let b = thrust_to_wrench(&ThrustCommand(t.map(|x| k * x)), &p);
        prop_assert!((b.as_vector() - a.as_vector() * k).abs().max() < 1e-12);
    }

    #[test]
    fn derivative_kinematics_match_rotation(s in arb_state()) {
        let p = VesselParams::default();
        let d = dynamics_derivative(&s, &Wrench::ZERO, &p);
        let eta_dot = rotation_matrix(s.psi) * s.nu();
        prop_assert!((Vector3::new(d[0], d[1], d[2]) - eta_dot).abs().max() < 1e-12);
    }
}
