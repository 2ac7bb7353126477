//! Fully actuated 3-DOF surface vessel (surge, sway, yaw).
//!
//! Body-frame dynamics `M ν̇ + C_RB(ν) ν + N ν = τ_c` with the kinematic map
//! `η̇ = J(ψ) ν`. Environmental disturbances are not modelled. The world frame
//! is planar with heading `ψ` measured counter-clockwise from +x; the body
//! frame has +x along the bow and +y to port.

use nalgebra::{Matrix3, Matrix3x4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::geom::{normalize_angle, Pose2, Vec2};

/// Pose `η = (x, y, ψ)` and body velocities `ν = (u, v, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VesselState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

impl VesselState {
    pub fn new(x: f64, y: f64, psi: f64, u: f64, v: f64, r: f64) -> Self {
        Self {
            x,
            y,
            psi: normalize_angle(psi),
            u,
            v,
            r,
        }
    }

    pub fn at_rest(x: f64, y: f64, psi: f64) -> Self {
        Self::new(x, y, psi, 0.0, 0.0, 0.0)
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn pose(&self) -> Pose2 {
        Pose2::new(self.x, self.y, self.psi)
    }

    pub fn eta(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.psi)
    }

    pub fn nu(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.r)
    }

    /// Planar speed `√(u² + v²)`.
    pub fn speed(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.psi, self.u, self.v, self.r]
            .iter()
            .all(|f| f.is_finite())
    }
}

/// Thruster magnitudes in newtons: two longitudinal thrusters followed by two
/// lateral ones.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThrustCommand(pub [f64; 4]);

impl ThrustCommand {
    pub const ZERO: ThrustCommand = ThrustCommand([0.0; 4]);

    pub fn clamped(self, t_max: f64) -> Self {
        ThrustCommand(self.0.map(|t| t.clamp(-t_max, t_max)))
    }

    pub fn within(&self, t_max: f64) -> bool {
        self.0.iter().all(|t| t.abs() <= t_max)
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::from(self.0)
    }
}

/// Generalized force in the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    pub fx: f64,
    pub fy: f64,
    pub mz: f64,
}

impl Wrench {
    pub const ZERO: Wrench = Wrench {
        fx: 0.0,
        fy: 0.0,
        mz: 0.0,
    };

    pub fn new(fx: f64, fy: f64, mz: f64) -> Self {
        Self { fx, fy, mz }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.fx, self.fy, self.mz)
    }
}

/// Physical parameters of the vessel. Construct through [`VesselParams::new`]
/// so the mass matrix inverse is validated once, up front.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselParams {
    mass: Matrix3<f64>,
    mass_inv: Matrix3<f64>,
    damping: Matrix3<f64>,
    allocation: Matrix3x4<f64>,
    /// Footprint length along the bow axis [m].
    pub length: f64,
    /// Footprint width [m].
    pub width: f64,
    /// Per-thruster magnitude limit [N].
    pub t_max: f64,
}

pub const DEFAULT_LENGTH: f64 = 2.0;
pub const DEFAULT_WIDTH: f64 = 1.0;
pub const DEFAULT_T_MAX: f64 = 20.0;

/// Allocation for two longitudinal thrusters at `y = ±W/2` and two lateral
/// thrusters at `x = ±L/2`.
pub fn default_allocation(length: f64, width: f64) -> Matrix3x4<f64> {
    let (hl, hw) = (length / 2.0, width / 2.0);
    #[rustfmt::skip]
    let b = Matrix3x4::new(
        1.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 1.0,
        -hw, hw,  hl,  -hl,
    );
    b
}

impl Default for VesselParams {
    fn default() -> Self {
        VesselParams::new(
            Matrix3::from_diagonal(&Vector3::new(25.0, 30.0, 6.0)),
            Matrix3::from_diagonal(&Vector3::new(8.0, 10.0, 4.0)),
            default_allocation(DEFAULT_LENGTH, DEFAULT_WIDTH),
            DEFAULT_LENGTH,
            DEFAULT_WIDTH,
            DEFAULT_T_MAX,
        )
        .expect("default vessel parameters are valid")
    }
}

impl VesselParams {
    pub fn new(
        mass: Matrix3<f64>,
        damping: Matrix3<f64>,
        allocation: Matrix3x4<f64>,
        length: f64,
        width: f64,
        t_max: f64,
    ) -> Result<Self> {
        if !(length > 0.0 && width > 0.0) {
            return Err(Error::config("vessel footprint must have positive length and width"));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::config("t_max must be positive and finite"));
        }
        if (mass - mass.transpose()).abs().max() > 1e-9 * mass.abs().max().max(1.0) {
            return Err(Error::config("mass matrix must be symmetric"));
        }
        if mass.cholesky().is_none() {
            return Err(Error::config("mass matrix must be positive definite"));
        }
        let mass_inv = mass
            .try_inverse()
            .ok_or_else(|| Error::config("mass matrix is singular"))?;
        let damping_sym = (damping + damping.transpose()) * 0.5;
        if damping_sym.cholesky().is_none() {
            return Err(Error::config(
                "damping matrix must have a positive-definite symmetric part",
            ));
        }
        if allocation.rank(1e-9) != 3 {
            return Err(Error::config("thruster allocation must have rank 3"));
        }
        Ok(Self {
            mass,
            mass_inv,
            damping,
            allocation,
            length,
            width,
            t_max,
        })
    }

    pub fn mass(&self) -> &Matrix3<f64> {
        &self.mass
    }

    pub fn damping(&self) -> &Matrix3<f64> {
        &self.damping
    }

    pub fn allocation(&self) -> &Matrix3x4<f64> {
        &self.allocation
    }

    /// Rigid-body Coriolis/centripetal matrix. Skew-symmetric, so
    /// `νᵀ C_RB(ν) ν = 0` for every `ν`.
    pub fn coriolis(&self, nu: &Vector3<f64>) -> Matrix3<f64> {
        let m = &self.mass;
        let (u, v, r) = (nu[0], nu[1], nu[2]);
        let c13 = -(m[(1, 1)] * v + m[(1, 2)] * r);
        let c23 = m[(0, 0)] * u;
        #[rustfmt::skip]
        let c = Matrix3::new(
            0.0,  0.0,  c13,
            0.0,  0.0,  c23,
            -c13, -c23, 0.0,
        );
        c
    }

    /// Kinetic-energy proxy `½ νᵀ M ν`.
    pub fn kinetic_energy(&self, state: &VesselState) -> f64 {
        let nu = state.nu();
        0.5 * nu.dot(&(self.mass * nu))
    }
}

/// `J(ψ)`: planar rotation by `ψ` with unit yaw entry.
pub fn rotation_matrix(psi: f64) -> Matrix3<f64> {
    let (s, c) = psi.sin_cos();
    #[rustfmt::skip]
    let j = Matrix3::new(
        c,   -s,  0.0,
        s,   c,   0.0,
        0.0, 0.0, 1.0,
    );
    j
}

pub fn thrust_to_wrench(cmd: &ThrustCommand, params: &VesselParams) -> Wrench {
    let tau = params.allocation * cmd.as_vector();
    Wrench::new(tau[0], tau[1], tau[2])
}

/// State derivative `(η̇, ν̇)` as a 6-vector.
pub fn dynamics_derivative(state: &VesselState, tau: &Wrench, params: &VesselParams) -> [f64; 6] {
    let nu = state.nu();
    let eta_dot = rotation_matrix(state.psi) * nu;
    let rhs = tau.as_vector() - params.coriolis(&nu) * nu - params.damping * nu;
    let nu_dot = params.mass_inv * rhs;
    [eta_dot[0], eta_dot[1], eta_dot[2], nu_dot[0], nu_dot[1], nu_dot[2]]
}

fn offset(state: &VesselState, k: &[f64; 6], h: f64) -> VesselState {
    VesselState {
        x: state.x + h * k[0],
        y: state.y + h * k[1],
        psi: state.psi + h * k[2],
        u: state.u + h * k[3],
        v: state.v + h * k[4],
        r: state.r + h * k[5],
    }
}

/// One classical RK4 step with the command held over `dt`.
pub fn step(state: &VesselState, cmd: &ThrustCommand, dt: f64, params: &VesselParams) -> Result<VesselState> {
    let tau = thrust_to_wrench(cmd, params);
    let k1 = dynamics_derivative(state, &tau, params);
    let k2 = dynamics_derivative(&offset(state, &k1, dt / 2.0), &tau, params);
    let k3 = dynamics_derivative(&offset(state, &k2, dt / 2.0), &tau, params);
    let k4 = dynamics_derivative(&offset(state, &k3, dt), &tau, params);

    let mut incr = [0.0; 6];
    for i in 0..6 {
        incr[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    let mut next = offset(state, &incr, dt);
    if !next.is_finite() {
        return Err(Error::IntegrationBlowup { dt });
    }
    next.psi = normalize_angle(next.psi);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rotation_zero_is_identity() {
        assert_eq!(rotation_matrix(0.0), Matrix3::identity());
    }

    #[test]
    fn rotation_quarter_turn() {
        let eta_dot = rotation_matrix(FRAC_PI_2) * Vector3::new(1.0, 0.0, 0.0);
        assert_relative_eq!(eta_dot, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn rotation_orthonormal() {
        let j = rotation_matrix(0.3);
        assert!((j * j.transpose() - Matrix3::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn wrench_is_linear() {
        let p = VesselParams::default();
        assert_eq!(thrust_to_wrench(&ThrustCommand::ZERO, &p), Wrench::ZERO);
        let cmd = ThrustCommand([1.5, -2.0, 0.25, 3.0]);
        let w1 = thrust_to_wrench(&cmd, &p);
        let w2 = thrust_to_wrench(&ThrustCommand(cmd.0.map(|t| 2.0 * t)), &p);
        assert_eq!(w2.fx, 2.0 * w1.fx);
        assert_eq!(w2.fy, 2.0 * w1.fy);
        assert_eq!(w2.mz, 2.0 * w1.mz);
    }

    #[test]
    fn equal_longitudinal_thrust_is_pure_surge() {
        let p = VesselParams::default();
        let w = thrust_to_wrench(&ThrustCommand([3.0, 3.0, 0.0, 0.0]), &p);
        assert_eq!(w.fx, 6.0);
        assert_eq!(w.fy, 0.0);
        assert_eq!(w.mz, 0.0);
    }

    #[test]
    fn derivative_at_rest_is_zero() {
        let p = VesselParams::default();
        let d = dynamics_derivative(&VesselState::at_rest(1.0, 2.0, 0.4), &Wrench::ZERO, &p);
        assert_eq!(d, [0.0; 6]);
    }

    #[test]
    fn derivative_pure_surge_damping() {
        let p = VesselParams::default();
        let s = VesselState::new(0.0, 0.0, 0.7, 1.0, 0.0, 0.0);
        let d = dynamics_derivative(&s, &Wrench::ZERO, &p);
        assert_relative_eq!(d[3], -8.0 / 25.0, epsilon = 1e-15);
        assert_eq!(d[4], 0.0);
        assert_eq!(d[5], 0.0);
        assert_relative_eq!(d[0], 0.7f64.cos(), epsilon = 1e-15);
        assert_relative_eq!(d[1], 0.7f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn derivative_pure_yaw_moment() {
        let p = VesselParams::default();
        let d = dynamics_derivative(&VesselState::default(), &Wrench::new(0.0, 0.0, 1.0), &p);
        assert_eq!(&d[3..], &[0.0, 0.0, 1.0 / 6.0]);
    }

    #[test]
    fn rest_is_fixed_point() {
        let p = VesselParams::default();
        let s = VesselState::at_rest(3.0, -1.0, 2.0);
        for dt in [0.01, 0.05, 1.0] {
            assert_eq!(step(&s, &ThrustCommand::ZERO, dt, &p).unwrap(), s);
        }
    }

    #[test]
    fn damping_dissipates_speed() {
        let p = VesselParams::default();
        let s = VesselState::new(0.0, 0.0, 0.0, 0.3, 0.0, 0.0);
        let next = step(&s, &ThrustCommand::ZERO, 0.05, &p).unwrap();
        assert!(next.speed() < 0.3);
        // closed form for pure surge decay: u(t) = u0 exp(-N11/M11 t)
        assert_relative_eq!(next.u, 0.3 * (-8.0 / 25.0 * 0.05f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn blowup_is_reported() {
        let p = VesselParams::default();
        let s = VesselState::new(0.0, 0.0, 0.0, 1e300, 1e300, 1e300);
        assert!(matches!(
            step(&s, &ThrustCommand::ZERO, 0.05, &p),
            Err(Error::IntegrationBlowup { .. })
        ));
    }

    #[test]
    fn psi_is_normalized_after_step() {
        let p = VesselParams::default();
        let s = VesselState::new(0.0, 0.0, 3.1, 0.0, 0.0, 2.0);
        let next = step(&s, &ThrustCommand::ZERO, 0.05, &p).unwrap();
        assert!(next.psi > -std::f64::consts::PI && next.psi <= std::f64::consts::PI);
        assert!(next.psi < 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let m = Matrix3::from_diagonal(&Vector3::new(25.0, 30.0, 6.0));
        let n = Matrix3::from_diagonal(&Vector3::new(8.0, 10.0, 4.0));
        let b = default_allocation(2.0, 1.0);
        assert!(VesselParams::new(Matrix3::zeros(), n, b, 2.0, 1.0, 20.0).is_err());
        assert!(VesselParams::new(m, -n, b, 2.0, 1.0, 20.0).is_err());
        let mut rank2 = b;
        rank2.set_row(2, &rank2.row(0).clone_owned());
        assert!(VesselParams::new(m, n, rank2, 2.0, 1.0, 20.0).is_err());
        assert!(VesselParams::new(m, n, b, 0.0, 1.0, 20.0).is_err());
    }
}
