//! Augmented quadrotor dynamics.
//!
//! The model is the standard Euler-angle rigid body with the total thrust
//! routed through a double integrator (states ζ, ξ), giving a 14-dimensional
//! augmented state. The four virtual inputs are the thrust-chain acceleration
//! ū₁ = ξ̇ and the three torque-producing rotor-speed differences ū₂–ū₄,
//! which enter the body-rate rows with constant gains d/Ix, d/Iy, d/Iz.
//!
//! Sign conventions follow the source equations verbatim: the vertical
//! acceleration row is `v̇z = g − A₃·ζ/m`, i.e. positive z accelerates at +g
//! under zero thrust. No axis flipping is performed anywhere in the crate.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jet::Scalar;

/// Margin on |θ| keeping the Euler kinematics away from ±π/2 (rad).
pub const EPS_THETA: f64 = 1e-6;
/// Margin on |φ| used by decoupling-domain checks (rad).
pub const EPS_PHI: f64 = 1e-6;

/// Divergence bound used by the simulator: any state component exceeding
/// this magnitude terminates the run.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// Physical constants of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadParams {
    /// Mass (kg).
    pub m: f64,
    /// Arm length (m).
    pub d: f64,
    /// Rotational inertia about the body x-axis (kg·m²).
    pub ix: f64,
    /// Rotational inertia about the body y-axis (kg·m²).
    pub iy: f64,
    /// Rotational inertia about the body z-axis (kg·m²).
    pub iz: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
}

impl QuadParams {
    pub fn new(m: f64, d: f64, ix: f64, iy: f64, iz: f64, g: f64) -> Result<Self> {
        let p = Self {
            m,
            d,
            ix,
            iy,
            iz,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m", self.m),
            ("d", self.d),
            ("ix", self.ix),
            ("iy", self.iy),
            ("iz", self.iz),
            ("g", self.g),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "parameter {name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for QuadParams {
    /// Working defaults: m = 1 kg, d = 0.3 m, Ix = Iy = 0.02 kg·m²,
    /// Iz = 0.04 kg·m², g = 9.81 m/s².
    fn default() -> Self {
        Self {
            m: 1.0,
            d: 0.3,
            ix: 0.02,
            iy: 0.02,
            iz: 0.04,
            g: 9.81,
        }
    }
}

/// The 14-dimensional augmented state.
///
/// Serialized form is the flat array
/// `[x, y, z, psi, theta, phi, vx, vy, vz, zeta, xi, p, q, r]`.
/// Angles are not range-restricted: trajectories are allowed to leave the
/// zone of interest, and detecting that is the simulator's job.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State14 {
    /// Position in the earth frame (m).
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Yaw, pitch, roll (rad).
    pub psi: f64,
    pub theta: f64,
    pub phi: f64,
    /// Velocity in the earth frame (m/s).
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    /// Thrust-chain state: total thrust (N).
    pub zeta: f64,
    /// Thrust-chain rate (N/s).
    pub xi: f64,
    /// Body angular rates (rad/s).
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

/// State component indices in the canonical array order.
pub mod idx {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const Z: usize = 2;
    pub const PSI: usize = 3;
    pub const THETA: usize = 4;
    pub const PHI: usize = 5;
    pub const VX: usize = 6;
    pub const VY: usize = 7;
    pub const VZ: usize = 8;
    pub const ZETA: usize = 9;
    pub const XI: usize = 10;
    pub const P: usize = 11;
    pub const Q: usize = 12;
    pub const R: usize = 13;
}

impl State14 {
    pub fn to_array(&self) -> [f64; 14] {
        [
            self.x, self.y, self.z, self.psi, self.theta, self.phi, self.vx, self.vy, self.vz,
            self.zeta, self.xi, self.p, self.q, self.r,
        ]
    }

    pub fn from_array(a: [f64; 14]) -> Self {
        Self {
            x: a[0],
            y: a[1],
            z: a[2],
            psi: a[3],
            theta: a[4],
            phi: a[5],
            vx: a[6],
            vy: a[7],
            vz: a[8],
            zeta: a[9],
            xi: a[10],
            p: a[11],
            q: a[12],
            r: a[13],
        }
    }

    /// Hover equilibrium: level attitude, everything at rest, thrust m·g.
    pub fn hover(p: &QuadParams) -> Self {
        Self {
            zeta: p.m * p.g,
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Largest component magnitude.
    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Check |θ| < π/2 − εθ, required wherever 1/cos θ appears.
    pub fn check_theta_domain(&self) -> Result<()> {
        check_angle_domain("theta", self.theta, EPS_THETA)
    }

    /// Check both |θ| and |φ| against the open zone of interest.
    pub fn check_attitude_domain(&self) -> Result<()> {
        check_angle_domain("theta", self.theta, EPS_THETA)?;
        check_angle_domain("phi", self.phi, EPS_PHI)
    }
}

pub(crate) fn check_angle_domain(name: &'static str, value: f64, margin: f64) -> Result<()> {
    if value.abs() < std::f64::consts::FRAC_PI_2 - margin {
        Ok(())
    } else {
        Err(Error::Domain {
            angle: name,
            value,
            margin,
        })
    }
}

impl Serialize for State14 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for State14 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 14]>::deserialize(deserializer)?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(de::Error::custom("state components must be finite"));
        }
        Ok(Self::from_array(a))
    }
}

/// The four virtual inputs. `u1b` is the thrust-chain acceleration (N/s²);
/// `u2b`–`u4b` are squared-angular-velocity differences.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VirtualInput {
    pub u1b: f64,
    pub u2b: f64,
    pub u3b: f64,
    pub u4b: f64,
}

impl VirtualInput {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            u1b: a[0],
            u2b: a[1],
            u3b: a[2],
            u4b: a[3],
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.u1b, self.u2b, self.u3b, self.u4b]
    }
}

/// Time derivative of the augmented state, in the canonical array order.
pub type StateDerivative = [f64; 14];

/// Thrust-axis direction cosines:
///
/// `A₁ = cφ·cψ·sθ + sφ·sψ`, `A₂ = cφ·sψ·sθ − sφ·cψ`, `A₃ = cθ·cφ`.
///
/// These are the components of the body z-axis resolved in the earth frame,
/// so `A₁² + A₂² + A₃² = 1` for every attitude.
pub fn thrust_axis(psi: f64, theta: f64, phi: f64) -> (f64, f64, f64) {
    let (sp, cp) = psi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    (cf * cp * st + sf * sp, cf * sp * st - sf * cp, ct * cf)
}

/// Drift vector field f of the augmented model, generic over the coefficient
/// scalar so the exact same expression serves plain evaluation, dual-number
/// perturbation and Taylor-jet propagation.
///
/// Precondition (checked by the public wrappers, not here): cos θ bounded
/// away from zero at the evaluation point.
pub(crate) fn drift_generic<S: Scalar>(x: &[S; 14], p: &QuadParams) -> [S; 14] {
    use idx::*;
    let (spsi, cpsi) = x[PSI].sin_cos();
    let (stheta, ctheta) = x[THETA].sin_cos();
    let (sphi, cphi) = x[PHI].sin_cos();
    let ttheta = stheta / ctheta;

    let a1 = cphi * cpsi * stheta + sphi * spsi;
    let a2 = cphi * spsi * stheta - sphi * cpsi;
    let a3 = ctheta * cphi;

    let inv_m = -1.0 / p.m;

    [
        x[VX],
        x[VY],
        x[VZ],
        (sphi / ctheta) * x[Q] + (cphi / ctheta) * x[R],
        cphi * x[Q] - sphi * x[R],
        x[P] + sphi * ttheta * x[Q] + cphi * ttheta * x[R],
        (a1 * x[ZETA]).scale(inv_m),
        (a2 * x[ZETA]).scale(inv_m),
        (a3 * x[ZETA]).scale(inv_m) + S::from_f64(p.g),
        x[XI],
        S::zero(),
        (x[Q] * x[R]).scale((p.iy - p.iz) / p.ix),
        (x[P] * x[R]).scale((p.iz - p.ix) / p.iy),
        (x[P] * x[Q]).scale((p.ix - p.iy) / p.iz),
    ]
}

/// Constant input field g_j (1-based input index), as a 14-array.
pub fn input_field(j: usize, p: &QuadParams) -> [f64; 14] {
    let mut g = [0.0; 14];
    match j {
        1 => g[idx::XI] = 1.0,
        2 => g[idx::P] = p.d / p.ix,
        3 => g[idx::Q] = p.d / p.iy,
        4 => g[idx::R] = p.d / p.iz,
        _ => panic!("input index must be 1..=4, got {j}"),
    }
    g
}

/// Drift field f(x̄).
///
/// Errors with [`Error::Domain`] when |θ| is within [`EPS_THETA`] of ±π/2.
pub fn drift_field(s: &State14, p: &QuadParams) -> Result<StateDerivative> {
    s.check_theta_domain()?;
    Ok(drift_generic(&s.to_array(), p))
}

/// Full dynamics f(x̄) + Σ gᵢ·ūᵢ.
pub fn state_derivative(s: &State14, u: &VirtualInput, p: &QuadParams) -> Result<StateDerivative> {
    let mut d = drift_field(s, p)?;
    d[idx::XI] += u.u1b;
    d[idx::P] += p.d / p.ix * u.u2b;
    d[idx::Q] += p.d / p.iy * u.u3b;
    d[idx::R] += p.d / p.iz * u.u4b;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TAU: f64 = 1e-12;

    fn rest() -> State14 {
        State14::default()
    }

    #[test]
    fn thrust_axis_identity_attitude() {
        let (a1, a2, a3) = thrust_axis(0.0, 0.0, 0.0);
        assert_eq!((a1, a2, a3), (0.0, 0.0, 1.0));
    }

    #[test]
    fn thrust_axis_quarter_turns() {
        use std::f64::consts::FRAC_PI_2;
        let (a1, a2, a3) = thrust_axis(FRAC_PI_2, 0.0, FRAC_PI_2);
        assert!((a1 - 1.0).abs() < TAU);
        assert!(a2.abs() < TAU);
        assert!(a3.abs() < TAU);
    }

    #[test]
    fn thrust_axis_pitch_pi_over_six() {
        let (a1, a2, a3) = thrust_axis(0.0, std::f64::consts::FRAC_PI_6, 0.0);
        assert!((a1 - 0.5).abs() < TAU);
        assert!(a2.abs() < TAU);
        assert!((a3 - 0.75f64.sqrt()).abs() < TAU);
    }

    #[test]
    fn drift_vanishes_at_hover() {
        let p = QuadParams::default();
        let d = drift_field(&State14::hover(&p), &p).unwrap();
        assert_eq!(d, [0.0; 14]);
    }

    #[test]
    fn drift_free_fall_from_rest() {
        let p = QuadParams::default();
        let d = drift_field(&rest(), &p).unwrap();
        let mut expect = [0.0; 14];
        expect[idx::VZ] = p.g;
        assert_eq!(d, expect);
    }

    #[test]
    fn gyroscopic_rows_with_symmetric_inertia() {
        let p = QuadParams::default(); // ix == iy
        let s = State14 {
            p: 1.0,
            q: 1.0,
            r: 1.0,
            ..rest()
        };
        let d = drift_field(&s, &p).unwrap();
        assert_eq!(d[idx::P], (p.iy - p.iz) / p.ix);
        assert_eq!(d[idx::Q], (p.iz - p.ix) / p.iy);
        assert_eq!(d[idx::R], 0.0);
    }

    #[test]
    fn input_sparsity() {
        let p = QuadParams::default();
        let h = State14::hover(&p);
        let d = state_derivative(&h, &VirtualInput::from_array([1.0, 0.0, 0.0, 0.0]), &p).unwrap();
        let mut expect = [0.0; 14];
        expect[idx::XI] = 1.0;
        assert_eq!(d, expect);

        let d = state_derivative(&h, &VirtualInput::from_array([0.0, 1.0, 0.0, 0.0]), &p).unwrap();
        let mut expect = [0.0; 14];
        expect[idx::P] = 15.0; // d/ix = 0.3/0.02
        assert_eq!(d, expect);
    }

    #[test]
    fn theta_domain_rejected() {
        let p = QuadParams::default();
        let s = State14 {
            theta: std::f64::consts::FRAC_PI_2,
            ..rest()
        };
        assert!(matches!(
            drift_field(&s, &p),
            Err(Error::Domain { angle: "theta", .. })
        ));
    }

    #[test]
    fn state_array_round_trip() {
        let s = State14 {
            x: 1.0,
            y: 2.0,
            z: 3.0,
            psi: 0.1,
            theta: 0.2,
            phi: 0.3,
            vx: -1.0,
            vy: -2.0,
            vz: -3.0,
            zeta: 9.0,
            xi: 0.5,
            p: 0.01,
            q: 0.02,
            r: 0.03,
        };
        assert_eq!(State14::from_array(s.to_array()), s);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with('['));
        let back: State14 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn thrust_axis_is_unit(psi in -10.0f64..10.0, theta in -10.0f64..10.0, phi in -10.0f64..10.0) {
            let (a1, a2, a3) = thrust_axis(psi, theta, phi);
            prop_assert!((a1 * a1 + a2 * a2 + a3 * a3 - 1.0).abs() <= TAU);
        }

        #[test]
        fn derivative_affine_in_input(
            theta in -1.4f64..1.4, phi in -1.4f64..1.4, psi in -3.0f64..3.0,
            zeta in 1.0f64..20.0,
            u in proptest::array::uniform4(-5.0f64..5.0),
            w in proptest::array::uniform4(-5.0f64..5.0),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
        ) {
            let p = QuadParams::default();
            let s = State14 { psi, theta, phi, zeta, ..State14::default() };
            let f = drift_field(&s, &p).unwrap();
            let du = state_derivative(&s, &VirtualInput::from_array(u), &p).unwrap();
            let dw = state_derivative(&s, &VirtualInput::from_array(w), &p).unwrap();
            let uc: [f64; 4] = std::array::from_fn(|i| a * u[i] + b * w[i]);
            let dc = state_derivative(&s, &VirtualInput::from_array(uc), &p).unwrap();
            for i in 0..14 {
                let expect = f[i] + a * (du[i] - f[i]) + b * (dw[i] - f[i]);
                let scale = expect.abs().max(1.0);
                prop_assert!((dc[i] - expect).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn kinematic_rows_echo_velocity(
            vx in -5.0f64..5.0, vy in -5.0f64..5.0, vz in -5.0f64..5.0,
        ) {
            let p = QuadParams::default();
            let s = State14 { vx, vy, vz, ..State14::default() };
            let d = drift_field(&s, &p).unwrap();
            prop_assert_eq!(d[idx::X], vx);
            prop_assert_eq!(d[idx::Y], vy);
            prop_assert_eq!(d[idx::Z], vz);
        }
    }

    #[test]
    fn zero_input_matches_drift_exactly() {
        let p = QuadParams::default();
        let s = State14 {
            psi: 0.3,
            theta: 0.5,
            phi: -0.4,
            zeta: 7.0,
            xi: 1.0,
            p: 0.2,
            q: -0.1,
            r: 0.4,
            ..rest()
        };
        assert_eq!(
            state_derivative(&s, &VirtualInput::zero(), &p).unwrap(),
            drift_field(&s, &p).unwrap()
        );
    }
}
