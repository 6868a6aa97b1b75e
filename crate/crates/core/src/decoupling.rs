//! Closed-form yaw-position decoupling system.
//!
//! For the output set (x, y, z, ψ) with chain orders (4, 4, 4, 2), the
//! highest output derivatives take the affine form `y^(k) = Ma(x̄) + Δ(x̄)·ū`.
//! This module assembles all 16 entries of Δ in closed form from the
//! trigonometric coefficient sets below, together with determinant and
//! condition diagnostics and a guarded inverse.
//!
//! The drift vector Ma has no closed form here; it is defined by the jet
//! engine ([`crate::liederiv::numeric_row`]), which also serves as the
//! independent oracle for every Δ entry.
//!
//! Coefficient sets: with A₁, A₂, A₃ the thrust-axis direction cosines,
//! (Mᵢ, Nᵢ, Oᵢ) are the partial derivatives of Aᵢ with respect to yaw, roll
//! and pitch respectively, so that `Ȧᵢ = Mᵢ·ψ̇ + Nᵢ·φ̇ + Oᵢ·θ̇`:
//!
//! ```text
//! M₁ = cψ·sφ − sψ·sθ·cφ      M₂ = sψ·sφ + cψ·sθ·cφ      (M₃ = 0)
//! N₁ = sψ·cφ − cψ·sθ·sφ      N₂ = −cψ·cφ − sψ·sθ·sφ     N₃ = −cθ·sφ
//! O₁ = cψ·cθ·cφ              O₂ = sψ·cθ·cφ              O₃ = −sθ·cφ
//! ```

use crate::control::Mode;
use crate::error::{Error, Result};
use crate::liederiv::{numeric_rows, Output};
use crate::linalg::{cond1, row_norm_product, Lu4};
use crate::model::{thrust_axis, QuadParams, State14, VirtualInput};

/// Condition-estimate threshold above which inversion is refused.
pub const COND_LIMIT: f64 = 1e8;
/// Determinant floor, relative to the product of row norms.
pub const DET_FLOOR_REL: f64 = 1e-12;

/// Output/order table for the yaw-position mode.
pub const YAWPOS_OUTPUTS: [(Output, usize); 4] = [
    (Output::X, 4),
    (Output::Y, 4),
    (Output::Z, 4),
    (Output::Psi, 2),
];

/// Thrust-axis components and their attitude partial derivatives at one
/// attitude. All entries are dimensionless; a₁² + a₂² + a₃² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub m1: f64,
    pub n1: f64,
    pub o1: f64,
    pub m2: f64,
    pub n2: f64,
    pub o2: f64,
    pub n3: f64,
    pub o3: f64,
}

/// Evaluate the coefficient sets at an attitude. Total function.
pub fn mno_coefficients(psi: f64, theta: f64, phi: f64) -> CoefficientSet {
    let (sp, cp) = psi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    let (a1, a2, a3) = thrust_axis(psi, theta, phi);
    CoefficientSet {
        a1,
        a2,
        a3,
        m1: cp * sf - sp * st * cf,
        n1: sp * cf - cp * st * sf,
        o1: cp * ct * cf,
        m2: sp * sf + cp * st * cf,
        n2: -cp * cf - sp * st * sf,
        o2: sp * ct * cf,
        n3: -ct * sf,
        o3: -st * cf,
    }
}

/// The pair (Ma, Δ) of one output mode, with inversion diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingSystem {
    pub mode: Mode,
    /// Drift entries of the highest output derivatives.
    pub ma: [f64; 4],
    /// `delta[i][j]` multiplies ū_{j+1} in output i's chain.
    pub delta: [[f64; 4]; 4],
    pub det: f64,
    /// 1-norm condition estimate; infinite for an exactly singular Δ.
    pub cond: f64,
}

impl DecouplingSystem {
    fn from_parts(mode: Mode, ma: [f64; 4], delta: [[f64; 4]; 4]) -> Self {
        let lu = Lu4::factor(&delta);
        Self {
            mode,
            ma,
            delta,
            det: lu.det(),
            cond: cond1(&delta, &lu),
        }
    }

    /// Scale-free singularity test: condition estimate beyond [`COND_LIMIT`]
    /// or |det| below [`DET_FLOOR_REL`] times the product of row norms.
    pub fn is_singular(&self) -> bool {
        self.cond > COND_LIMIT || self.det.abs() < DET_FLOOR_REL * row_norm_product(&self.delta)
    }

    /// The record emitted by the CLI `delta` command: mode, row-major Δ,
    /// Ma, determinant, condition estimate.
    pub fn to_json(&self) -> serde_json::Value {
        let flat: Vec<f64> = self.delta.iter().flatten().copied().collect();
        serde_json::json!({
            "mode": self.mode,
            "delta": flat,
            "ma": self.ma,
            "det": self.det,
            "cond": self.cond,
        })
    }
}

fn delta_entries(s: &State14, p: &QuadParams) -> [[f64; 4]; 4] {
    let c = mno_coefficients(s.psi, s.theta, s.phi);
    let (st, ct) = s.theta.sin_cos();
    let (sf, cf) = s.phi.sin_cos();
    let tt = st / ct;
    let zm = s.zeta / p.m;
    let (gx, gy, gz) = (p.d / p.ix, p.d / p.iy, p.d / p.iz);

    // Pitch-torque and yaw-torque combinations per position row:
    // Pᵢ = Mᵢ·sφ/cθ + Nᵢ·sφ·tθ + Oᵢ·cφ,  Qᵢ = Mᵢ·cφ/cθ + Nᵢ·cφ·tθ − Oᵢ·sφ.
    let p1 = c.m1 * sf / ct + c.n1 * sf * tt + c.o1 * cf;
    let q1 = c.m1 * cf / ct + c.n1 * cf * tt - c.o1 * sf;
    let p2 = c.m2 * sf / ct + c.n2 * sf * tt + c.o2 * cf;
    let q2 = c.m2 * cf / ct + c.n2 * cf * tt - c.o2 * sf;
    let p3 = c.n3 * sf * tt + c.o3 * cf;
    let q3 = c.n3 * cf * tt - c.o3 * sf;

    [
        [-c.a1 / p.m, -zm * c.n1 * gx, -zm * p1 * gy, -zm * q1 * gz],
        [-c.a2 / p.m, -zm * c.n2 * gx, -zm * p2 * gy, -zm * q2 * gz],
        [-c.a3 / p.m, -zm * c.n3 * gx, -zm * p3 * gy, -zm * q3 * gz],
        [0.0, 0.0, sf / ct * gy, cf / ct * gz],
    ]
}

/// Closed-form Δ for the yaw-position mode, with determinant and condition
/// diagnostics. Ma is left zero; use [`yawpos_system`] when it is needed.
pub fn delta_yawpos(s: &State14, p: &QuadParams) -> Result<DecouplingSystem> {
    s.check_attitude_domain()?;
    Ok(DecouplingSystem::from_parts(
        Mode::YawPosition,
        [0.0; 4],
        delta_entries(s, p),
    ))
}

/// Drift entries of the yaw-position chains, `(x⁽⁴⁾, y⁽⁴⁾, z⁽⁴⁾, ψ̈)` drift
/// parts, computed by the jet engine.
pub fn ma_yawpos(s: &State14, p: &QuadParams) -> Result<[f64; 4]> {
    s.check_attitude_domain()?;
    let (ma, _) = numeric_rows(&YAWPOS_OUTPUTS, s, p)?;
    Ok(ma)
}

/// Full yaw-position system: closed-form Δ plus jet-based Ma.
pub fn yawpos_system(s: &State14, p: &QuadParams) -> Result<DecouplingSystem> {
    let ma = ma_yawpos(s, p)?;
    Ok(DecouplingSystem::from_parts(
        Mode::YawPosition,
        ma,
        delta_entries(s, p),
    ))
}

/// Solve `Δ·ū = v − Ma`, refusing when the system looks singular.
pub fn invert_delta(dsys: &DecouplingSystem, v: &[f64; 4]) -> Result<VirtualInput> {
    if dsys.is_singular() {
        return Err(Error::Singular {
            det: dsys.det,
            cond: dsys.cond,
        });
    }
    let rhs = std::array::from_fn(|i| v[i] - dsys.ma[i]);
    let lu = Lu4::factor(&dsys.delta);
    let u = lu.solve(&rhs).ok_or(Error::Singular {
        det: dsys.det,
        cond: dsys.cond,
    })?;
    Ok(VirtualInput::from_array(u))
}
