//! Feedback-linearization control laws.
//!
//! Two output modes share one state space and one mechanism:
//!
//! * [`Mode::YawPosition`] — outputs (x, y, z, ψ) with chain orders
//!   (4, 4, 4, 2); Δ comes from the closed form in [`crate::decoupling`].
//! * [`Mode::AttitudeAltitude`] — outputs (z, φ, θ, ψ) with chain orders
//!   (4, 2, 2, 2); its rows come from the jet engine. The altitude chain
//!   keeps the thrust double integrator (relative degree 4) so both modes
//!   act on the same augmented state and can be switched cleanly.
//!
//! The outer loop places the poles of each linearized integrator chain:
//! `v = Σ gᵢ·(refᵢ − y⁽ⁱ⁾)` with reference derivatives zero beyond order 0
//! (setpoint tracking), and the inner law is `ū = Δ⁻¹·(v − Ma)`.

use serde::{Deserialize, Serialize};

use crate::decoupling::{invert_delta, yawpos_system, DecouplingSystem};
use crate::error::{Error, Result};
use crate::liederiv::{flow_taylor, numeric_rows, Output};
use crate::model::{QuadParams, State14, VirtualInput};

/// Which output set the feedback-linearizing controller inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "yawpos")]
    YawPosition,
    #[serde(rename = "altatt")]
    AttitudeAltitude,
}

impl Mode {
    /// Output/order table of the mode's four chains.
    pub fn outputs(self) -> [(Output, usize); 4] {
        match self {
            Mode::YawPosition => crate::decoupling::YAWPOS_OUTPUTS,
            Mode::AttitudeAltitude => [
                (Output::Z, 4),
                (Output::Phi, 2),
                (Output::Theta, 2),
                (Output::Psi, 2),
            ],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::YawPosition => "yawpos",
            Mode::AttitudeAltitude => "altatt",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yawpos" => Ok(Mode::YawPosition),
            "altatt" => Ok(Mode::AttitudeAltitude),
            other => Err(Error::Config(format!(
                "unknown mode {other:?}, expected \"yawpos\" or \"altatt\""
            ))),
        }
    }
}

/// Routh–Hurwitz test for `s^n + a[n−1]·s^(n−1) + … + a[0]` (monic, `a` in
/// ascending order). Returns true iff all roots have strictly negative real
/// parts. Degenerate first-column zeros count as not Hurwitz.
pub fn is_hurwitz(ascending: &[f64]) -> bool {
    let n = ascending.len();
    if n == 0 {
        return false;
    }
    // Rows of the Routh array, built from coefficients in descending order:
    // [1, a[n-1], a[n-2], ..., a[0]].
    let mut desc = Vec::with_capacity(n + 1);
    desc.push(1.0);
    for k in (0..n).rev() {
        desc.push(ascending[k]);
    }
    let width = n / 2 + 1;
    let mut row0 = vec![0.0; width + 1];
    let mut row1 = vec![0.0; width + 1];
    for (i, &c) in desc.iter().enumerate() {
        if i % 2 == 0 {
            row0[i / 2] = c;
        } else {
            row1[i / 2] = c;
        }
    }
    if n == 1 {
        return ascending[0] > 0.0;
    }
    for _ in 0..(n - 1) {
        if row1[0] == 0.0 {
            return false;
        }
        let mut next = vec![0.0; width + 1];
        for j in 0..width {
            next[j] = (row1[0] * row0[j + 1] - row0[0] * row1[j + 1]) / row1[0];
        }
        if !(row1[0] > 0.0 && row0[0] > 0.0) {
            return false;
        }
        row0 = row1;
        row1 = next;
    }
    row0[0] > 0.0 && row1[0] > 0.0
}

/// Per-output tracking gains for one mode's error chains.
///
/// `chains[i]` holds `(g₀, …, g_{k−1})` for output i of relative degree k;
/// the closed-loop characteristic polynomial of that chain is
/// `s^k + g_{k−1}·s^{k−1} + … + g₀`, required to be Hurwitz at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSet {
    chains: [Vec<f64>; 4],
}

impl GainSet {
    pub fn new(mode: Mode, chains: [Vec<f64>; 4]) -> Result<Self> {
        let orders = mode.outputs();
        for (i, chain) in chains.iter().enumerate() {
            let k = orders[i].1;
            if chain.len() != k {
                return Err(Error::Config(format!(
                    "gain chain {i} must have length {k} for mode {}, got {}",
                    mode.as_str(),
                    chain.len()
                )));
            }
            if chain.iter().any(|g| !g.is_finite()) {
                return Err(Error::Config(format!(
                    "gain chain {i} has non-finite entries"
                )));
            }
            if !is_hurwitz(chain) {
                return Err(Error::Config(format!(
                    "gain chain {i} ({chain:?}) is not Hurwitz"
                )));
            }
        }
        Ok(Self { chains })
    }

    /// Gains placing every pole of every chain at `pole` (< 0): binomial
    /// expansion of `(s − pole)^k`.
    pub fn all_poles_at(mode: Mode, pole: f64) -> Result<Self> {
        if !(pole.is_finite() && pole < 0.0) {
            return Err(Error::Config(format!(
                "pole must be finite and strictly negative, got {pole}"
            )));
        }
        let lambda = -pole;
        let chains = mode.outputs().map(|(_, k)| {
            (0..k)
                .map(|i| binomial(k, i) * lambda.powi((k - i) as i32))
                .collect::<Vec<f64>>()
        });
        Self::new(mode, chains)
    }

    pub fn chain(&self, i: usize) -> &[f64] {
        &self.chains[i]
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Setpoints for one mode's outputs; higher reference derivatives are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSet {
    YawPosition {
        x: f64,
        y: f64,
        z: f64,
        psi: f64,
    },
    AttitudeAltitude {
        z: f64,
        phi: f64,
        theta: f64,
        psi: f64,
    },
}

impl ReferenceSet {
    pub fn mode(&self) -> Mode {
        match self {
            ReferenceSet::YawPosition { .. } => Mode::YawPosition,
            ReferenceSet::AttitudeAltitude { .. } => Mode::AttitudeAltitude,
        }
    }

    /// Setpoints in the mode's output order.
    pub fn setpoints(&self) -> [f64; 4] {
        match *self {
            ReferenceSet::YawPosition { x, y, z, psi } => [x, y, z, psi],
            ReferenceSet::AttitudeAltitude { z, phi, theta, psi } => [z, phi, theta, psi],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.setpoints().iter().all(|v| v.is_finite())
    }
}

/// Outer-loop tracking command on the linearized chains:
/// `vᵢ = g₀·(rᵢ − yᵢ) − Σ_{j≥1} gⱼ·yᵢ⁽ʲ⁾`.
pub fn outer_loop_v(
    s: &State14,
    refs: &ReferenceSet,
    gains: &GainSet,
    p: &QuadParams,
) -> Result<[f64; 4]> {
    let mode = refs.mode();
    let outputs = mode.outputs();
    let setpoints = refs.setpoints();
    let mut v = [0.0; 4];
    for i in 0..4 {
        let (h, k) = outputs[i];
        let chain = flow_taylor(h, s, p, k - 1)?;
        let g = gains.chain(i);
        let mut vi = g[0] * (setpoints[i] - chain.values[0]);
        for j in 1..k {
            vi -= g[j] * chain.values[j];
        }
        v[i] = vi;
    }
    Ok(v)
}

/// Attitude-altitude decoupling system: outputs (z, φ, θ, ψ) with chain
/// orders (4, 2, 2, 2), every row from the jet engine. The z row equals the
/// yaw-position z row and the ψ row is shared verbatim; the φ and θ rows
/// couple only the torque inputs ū₂–ū₄.
pub fn delta_altatt(s: &State14, p: &QuadParams) -> Result<DecouplingSystem> {
    altatt_system(s, p)
}

/// Same as [`delta_altatt`]; named for symmetry with
/// [`crate::decoupling::yawpos_system`].
pub fn altatt_system(s: &State14, p: &QuadParams) -> Result<DecouplingSystem> {
    s.check_attitude_domain()?;
    let outputs = Mode::AttitudeAltitude.outputs();
    let (ma, delta) = numeric_rows(&outputs, s, p)?;
    let lu = crate::linalg::Lu4::factor(&delta);
    Ok(DecouplingSystem {
        mode: Mode::AttitudeAltitude,
        ma,
        delta,
        det: lu.det(),
        cond: crate::linalg::cond1(&delta, &lu),
    })
}

/// Decoupling system of the given mode at a state.
pub fn mode_system(mode: Mode, s: &State14, p: &QuadParams) -> Result<DecouplingSystem> {
    match mode {
        Mode::YawPosition => yawpos_system(s, p),
        Mode::AttitudeAltitude => altatt_system(s, p),
    }
}

/// The feedback-linearizing control law `ū = Δ⁻¹·(v − Ma)` for the mode
/// selected by `refs`. Returns the input together with the decoupling system
/// used, so callers can log determinant/condition diagnostics.
pub fn fl_law_with_system(
    s: &State14,
    p: &QuadParams,
    refs: &ReferenceSet,
    gains: &GainSet,
) -> Result<(VirtualInput, DecouplingSystem)> {
    let sys = mode_system(refs.mode(), s, p)?;
    let v = outer_loop_v(s, refs, gains, p)?;
    let u = invert_delta(&sys, &v)?;
    Ok((u, sys))
}

/// The feedback-linearizing control law; see [`fl_law_with_system`].
pub fn fl_law(
    s: &State14,
    p: &QuadParams,
    refs: &ReferenceSet,
    gains: &GainSet,
) -> Result<VirtualInput> {
    fl_law_with_system(s, p, refs, gains).map(|(u, _)| u)
}
