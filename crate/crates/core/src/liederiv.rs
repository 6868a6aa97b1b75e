//! Numerical Lie-derivative engine.
//!
//! Computes iterated Lie derivatives `L_f^k h` of a scalar state output `h`
//! along the drift field, and input couplings `L_{g_j} L_f^{k−1} h`, by
//! propagating a degree-k truncated Taylor polynomial in time through the
//! drift dynamics (see [`crate::jet`]). Results are exact to floating-point
//! rounding — there is no step size and no truncation error.
//!
//! This module is the independent oracle against which every closed-form
//! decoupling coefficient is checked, and it is the normative definition of
//! the drift vector Ma (whose full closed form is never written out).
//!
//! The input coupling exploits the input fields being constant: seeding one
//! dual-number direction per field at the initial condition and reading the
//! infinitesimal part of the (k−1)-th flow derivative yields
//! `∇(L_f^{k−1}h)·g_j` without any Jacobian machinery.

use crate::error::{Error, Result};
use crate::jet::{Dual, Scalar, Taylor, MAX_ORDER};
use crate::model::{drift_generic, idx, input_field, QuadParams, State14};

/// Scalar state outputs whose derivative chains can be requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    X,
    Y,
    Z,
    Psi,
    Theta,
    Phi,
}

impl Output {
    /// Index of the output component in the canonical state array.
    pub fn state_index(self) -> usize {
        match self {
            Output::X => idx::X,
            Output::Y => idx::Y,
            Output::Z => idx::Z,
            Output::Psi => idx::PSI,
            Output::Theta => idx::THETA,
            Output::Phi => idx::PHI,
        }
    }
}

/// The chain `[h, L_f h, …, L_f^k h]` evaluated at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct LieChain {
    /// `values[j] = L_f^j h`; length is `order + 1`.
    pub values: Vec<f64>,
    pub order: usize,
}

const FACTORIAL: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

fn check_order(k: usize) -> Result<()> {
    if k > MAX_ORDER {
        Err(Error::Order {
            requested: k,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Propagate Taylor coefficients of the drift flow, one degree at a time.
///
/// After the call, `x[i].c[j]` is the j-th Taylor coefficient of state
/// component i along the drift flow for all j ≤ k. Degree n+1 coefficients
/// are obtained from degree n of the drift evaluated on the current
/// truncation, which only depends on coefficients 0..=n — already final.
fn propagate<S: Scalar>(x: &mut [Taylor<S>; 14], p: &QuadParams, k: usize) {
    for n in 0..k {
        let d = drift_generic(x, p);
        for i in 0..14 {
            x[i].c[n + 1] = d[i].c[n].scale(1.0 / (n + 1) as f64);
        }
    }
}

fn seed_plain(s: &State14) -> [Taylor<f64>; 14] {
    let a = s.to_array();
    std::array::from_fn(|i| Taylor::constant(a[i]))
}

/// Seed every input field as one dual direction: eps slot j−1 carries g_j.
fn seed_all_inputs(s: &State14, p: &QuadParams) -> [Taylor<Dual<4>>; 14] {
    let a = s.to_array();
    let g: [[f64; 14]; 4] = std::array::from_fn(|j| input_field(j + 1, p));
    std::array::from_fn(|i| Taylor::constant(Dual::seeded(a[i], std::array::from_fn(|j| g[j][i]))))
}

/// The chain `[h, L_f h, …, L_f^k h]` at `s`, for `k ≤ 4`.
pub fn flow_taylor(h: Output, s: &State14, p: &QuadParams, k: usize) -> Result<LieChain> {
    check_order(k)?;
    s.check_theta_domain()?;
    let mut x = seed_plain(s);
    propagate(&mut x, p, k);
    let hi = h.state_index();
    Ok(LieChain {
        values: (0..=k).map(|j| FACTORIAL[j] * x[hi].c[j]).collect(),
        order: k,
    })
}

/// `L_{g_j} L_f^{k−1} h` at `s`, for `1 ≤ k ≤ 4` and input index `j ∈ 1..=4`.
pub fn input_coupling(h: Output, s: &State14, p: &QuadParams, k: usize, j: usize) -> Result<f64> {
    if !(1..=4).contains(&j) {
        return Err(Error::Config(format!("input index must be 1..=4, got {j}")));
    }
    let (_, coeffs) = numeric_row(h, s, p, k)?;
    Ok(coeffs[j - 1])
}

/// One full row of the linearizing normal form `y^(k) = Ma + Δ·ū`:
/// the drift entry `L_f^k h` and the four couplings `L_{g_j} L_f^{k−1} h`.
pub fn numeric_row(h: Output, s: &State14, p: &QuadParams, k: usize) -> Result<(f64, [f64; 4])> {
    check_order(k)?;
    if k == 0 {
        return Err(Error::Config(
            "input couplings need a chain order of at least 1".into(),
        ));
    }
    s.check_theta_domain()?;
    let mut x = seed_all_inputs(s, p);
    propagate(&mut x, p, k);
    let hi = h.state_index();
    let ma = FACTORIAL[k] * x[hi].c[k].re;
    let coeffs = std::array::from_fn(|j| FACTORIAL[k - 1] * x[hi].c[k - 1].eps[j]);
    Ok((ma, coeffs))
}

/// All four rows of a mode's linearizing form in a single jet propagation.
///
/// `outputs[i]` pairs each output with its chain order. Returns `(ma, delta)`
/// where `delta[i][j]` is the coefficient of ū_{j+1} in row i.
pub fn numeric_rows(
    outputs: &[(Output, usize); 4],
    s: &State14,
    p: &QuadParams,
) -> Result<([f64; 4], [[f64; 4]; 4])> {
    let kmax = outputs.iter().map(|&(_, k)| k).max().unwrap();
    check_order(kmax)?;
    s.check_theta_domain()?;
    let mut x = seed_all_inputs(s, p);
    propagate(&mut x, p, kmax);
    let mut ma = [0.0; 4];
    let mut delta = [[0.0; 4]; 4];
    for (i, &(h, k)) in outputs.iter().enumerate() {
        let hi = h.state_index();
        ma[i] = FACTORIAL[k] * x[hi].c[k].re;
        delta[i] = std::array::from_fn(|j| FACTORIAL[k - 1] * x[hi].c[k - 1].eps[j]);
    }
    Ok((ma, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoupling::mno_coefficients;
    use crate::model::{drift_field, thrust_axis};

    fn close_rel(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-30)
    }

    fn generic_state() -> State14 {
        State14 {
            x: 0.4,
            y: -1.0,
            z: 2.0,
            psi: 0.7,
            theta: 0.45,
            phi: -0.6,
            vx: 1.1,
            vy: -0.2,
            vz: 0.3,
            zeta: 11.0,
            xi: 2.5,
            p: 0.8,
            q: -1.2,
            r: 0.9,
        }
    }

    #[test]
    fn hover_z_chain_is_zero() {
        let p = QuadParams::default();
        let h = State14 {
            z: 3.0,
            ..State14::hover(&p)
        };
        let chain = flow_taylor(Output::Z, &h, &p, 2).unwrap();
        assert_eq!(chain.values, vec![3.0, 0.0, 0.0]);
    }

    #[test]
    fn free_fall_z_chain() {
        let p = QuadParams::default();
        let s = State14::default();
        let chain = flow_taylor(Output::Z, &s, &p, 2).unwrap();
        assert_eq!(chain.values, vec![0.0, 0.0, p.g]);
    }

    #[test]
    fn order_cap() {
        let p = QuadParams::default();
        assert!(matches!(
            flow_taylor(Output::X, &State14::hover(&p), &p, 5),
            Err(Error::Order {
                requested: 5,
                max: 4
            })
        ));
    }

    /// Closed-form oracle for the third x-derivative:
    /// y⁽³⁾ = −(Ȧ₁·ζ + A₁·ξ)/m with Ȧ₁ = M₁·ψ̇ + N₁·φ̇ + O₁·θ̇
    /// assembled from the drift kinematics. Independent of the jet path.
    #[test]
    fn x_triple_derivative_matches_closed_form() {
        let p = QuadParams::default();
        let s = generic_state();
        let c = mno_coefficients(s.psi, s.theta, s.phi);
        let f = drift_field(&s, &p).unwrap();
        let (psidot, thetadot, phidot) = (f[idx::PSI], f[idx::THETA], f[idx::PHI]);
        let a1dot = c.m1 * psidot + c.n1 * phidot + c.o1 * thetadot;
        let (a1, _, _) = thrust_axis(s.psi, s.theta, s.phi);
        let expect = -(a1dot * s.zeta + a1 * s.xi) / p.m;

        let chain = flow_taylor(Output::X, &s, &p, 3).unwrap();
        assert!(
            close_rel(chain.values[3], expect, 1e-10),
            "{} vs {}",
            chain.values[3],
            expect
        );
    }

    #[test]
    fn psi_coupling_closed_form_any_state() {
        let p = QuadParams::default();
        for s in [generic_state(), State14::hover(&p)] {
            let got = input_coupling(Output::Psi, &s, &p, 2, 3).unwrap();
            let expect = s.phi.sin() / s.theta.cos() * p.d / p.iy;
            assert!(close_rel(got, expect, 1e-12), "{got} vs {expect}");
        }
    }

    #[test]
    fn z_coupling_to_thrust_at_hover() {
        let p = QuadParams::default();
        let got = input_coupling(Output::Z, &State14::hover(&p), &p, 4, 1).unwrap();
        assert!(close_rel(got, -1.0 / p.m, 1e-12));
    }

    /// Roll-torque coupling of the fourth x-derivative: −(ζ/m)·N₁·(d/Ix).
    #[test]
    fn x_coupling_to_roll_matches_closed_form() {
        let p = QuadParams::default();
        let s = generic_state();
        let c = mno_coefficients(s.psi, s.theta, s.phi);
        let expect = -(s.zeta / p.m) * c.n1 * (p.d / p.ix);
        let got = input_coupling(Output::X, &s, &p, 4, 2).unwrap();
        assert!(close_rel(got, expect, 1e-10), "{got} vs {expect}");
    }

    #[test]
    fn numeric_row_hover_psi() {
        let p = QuadParams::default();
        let (ma, coeffs) = numeric_row(Output::Psi, &State14::hover(&p), &p, 2).unwrap();
        assert_eq!(ma, 0.0);
        assert_eq!(coeffs, [0.0, 0.0, 0.0, p.d / p.iz]);
    }

    #[test]
    fn numeric_row_hover_x() {
        let p = QuadParams::default();
        let h = State14::hover(&p);
        let (ma, coeffs) = numeric_row(Output::X, &h, &p, 4).unwrap();
        assert_eq!(ma, 0.0);
        let expect = -h.zeta * p.d / (p.m * p.iy);
        assert!(close_rel(coeffs[2], expect, 1e-12));
        assert_eq!([coeffs[0], coeffs[1], coeffs[3]], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn numeric_row_rest_z_zero_thrust() {
        let p = QuadParams::default();
        let (_, coeffs) = numeric_row(Output::Z, &State14::default(), &p, 4).unwrap();
        assert!(close_rel(coeffs[0], -1.0 / p.m, 1e-12));
        assert_eq!([coeffs[1], coeffs[2], coeffs[3]], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn chain_prefix_stability() {
        let p = QuadParams::default();
        let s = generic_state();
        let full = flow_taylor(Output::Y, &s, &p, 4).unwrap();
        for k in 0..=4 {
            let partial = flow_taylor(Output::Y, &s, &p, k).unwrap();
            for j in 0..=k {
                assert_eq!(partial.values[j], full.values[j], "k={k} j={j}");
            }
        }
    }

    #[test]
    fn first_entry_equals_drift_component() {
        let p = QuadParams::default();
        let s = generic_state();
        let f = drift_field(&s, &p).unwrap();
        for (h, i) in [
            (Output::X, idx::X),
            (Output::Z, idx::Z),
            (Output::Psi, idx::PSI),
            (Output::Phi, idx::PHI),
        ] {
            let chain = flow_taylor(h, &s, &p, 1).unwrap();
            assert_eq!(chain.values[1], f[i]);
        }
    }

    #[test]
    fn batch_rows_match_single_rows() {
        let p = QuadParams::default();
        let s = generic_state();
        let outputs = [
            (Output::X, 4),
            (Output::Y, 4),
            (Output::Z, 4),
            (Output::Psi, 2),
        ];
        let (ma, delta) = numeric_rows(&outputs, &s, &p).unwrap();
        for (i, &(h, k)) in outputs.iter().enumerate() {
            let (mi, ci) = numeric_row(h, &s, &p, k).unwrap();
            assert_eq!(ma[i], mi);
            assert_eq!(delta[i], ci);
        }
    }
}
