//! Seeded property suites cross-examining the closed forms, the jet engine
//! and the integrator against one another.
//!
//! Every suite is deterministic given (samples, seed) and reports the worst
//! observed error, so the CLI `verify` command produces byte-identical
//! reports on repeated runs.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::delta_altatt;
use crate::decoupling::delta_yawpos;
use crate::error::Result;
use crate::liederiv::{flow_taylor, numeric_rows, Output};
use crate::model::{state_derivative, thrust_axis, QuadParams, State14, VirtualInput};
use crate::sim::rk4_step;

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub max_err: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl SuiteResult {
    pub fn line(&self) -> String {
        format!(
            "{:<18} {}  cases={:<6} max_err={:.3e} tol={:.0e}  {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.cases,
            self.max_err,
            self.tolerance,
            self.detail
        )
    }
}

/// Names of all suites, in execution order.
pub const SUITE_NAMES: [&str; 7] = [
    "a-normalization",
    "delta-equivalence",
    "zeta-scaling",
    "psi-invariance",
    "altatt-det",
    "rk4-order",
    "fd-flow",
];

/// Run one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, samples: usize, seed: u64) -> Option<SuiteResult> {
    Some(match name {
        "a-normalization" => a_normalization(samples.max(1), seed),
        "delta-equivalence" => delta_equivalence(samples.max(1), seed),
        "zeta-scaling" => zeta_scaling((samples / 10).max(1), seed),
        "psi-invariance" => psi_invariance((samples / 10).max(1), seed),
        "altatt-det" => altatt_det(samples.max(1), seed),
        "rk4-order" => rk4_order(),
        "fd-flow" => fd_flow((samples / 50).max(1), seed),
        _ => return None,
    })
}

/// Run every suite with the same sample budget and seed.
pub fn run_all(samples: usize, seed: u64) -> Vec<SuiteResult> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n, samples, seed).expect("known suite"))
        .collect()
}

fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// A state draw matching the decoupling comparison domain: attitude within
/// ±1.4 rad, thrust in [1, 20] N, rates in ±5 rad/s.
fn random_state(rng: &mut ChaCha8Rng) -> State14 {
    State14 {
        x: rng.random_range(-1.0..1.0),
        y: rng.random_range(-1.0..1.0),
        z: rng.random_range(-1.0..1.0),
        psi: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        theta: rng.random_range(-1.4..1.4),
        phi: rng.random_range(-1.4..1.4),
        vx: rng.random_range(-3.0..3.0),
        vy: rng.random_range(-3.0..3.0),
        vz: rng.random_range(-3.0..3.0),
        zeta: rng.random_range(1.0..20.0),
        xi: rng.random_range(-5.0..5.0),
        p: rng.random_range(-5.0..5.0),
        q: rng.random_range(-5.0..5.0),
        r: rng.random_range(-5.0..5.0),
    }
}

/// A₁² + A₂² + A₃² = 1 over random angle triples.
pub fn a_normalization(samples: usize, seed: u64) -> SuiteResult {
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    for _ in 0..samples {
        let (psi, theta, phi) = (
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let (a1, a2, a3) = thrust_axis(psi, theta, phi);
        max_err = max_err.max((a1 * a1 + a2 * a2 + a3 * a3 - 1.0).abs());
    }
    SuiteResult {
        name: "a-normalization",
        passed: max_err <= tol,
        cases: samples,
        max_err,
        tolerance: tol,
        detail: "thrust-axis column stays unit length".into(),
    }
}

/// Every closed-form Δ entry matches the jet-based row coefficients.
///
/// Per-entry comparison is relative to max(|closed|, |jet|) with an absolute
/// floor of 1e−4 times the largest entry of Δ. Entries that cancel to below
/// that fraction of the matrix scale carry no relative precision of their
/// own (both routes round them from intermediates of matrix scale), so the
/// floor asserts they agree to 1e−13 of the scale absolutely.
pub fn delta_equivalence(samples: usize, seed: u64) -> SuiteResult {
    let tol = 1e-9;
    let p = QuadParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let outputs = crate::decoupling::YAWPOS_OUTPUTS;
    for _ in 0..samples {
        let s = random_state(&mut rng);
        let closed = delta_yawpos(&s, &p).expect("in-domain sample");
        let (_, numeric) = numeric_rows(&outputs, &s, &p).expect("in-domain sample");
        let scale = closed
            .delta
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..4 {
            for j in 0..4 {
                let e = rel_err(closed.delta[i][j], numeric[i][j], 1e-4 * scale);
                max_err = max_err.max(e);
            }
        }
    }
    SuiteResult {
        name: "delta-equivalence",
        passed: max_err <= tol,
        cases: samples,
        max_err,
        tolerance: tol,
        detail: "closed-form Δ vs jet-based rows, all 16 entries".into(),
    }
}

/// det Δ(ζ) = ζ²·det Δ(1) at fixed attitude.
pub fn zeta_scaling(samples: usize, seed: u64) -> SuiteResult {
    let tol = 1e-9;
    let p = QuadParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    for _ in 0..samples {
        let mut s = random_state(&mut rng);
        s.zeta = 1.0;
        let det1 = delta_yawpos(&s, &p).expect("in-domain").det;
        let zeta = rng.random_range(0.1..25.0);
        s.zeta = zeta;
        let detz = delta_yawpos(&s, &p).expect("in-domain").det;
        max_err = max_err.max(rel_err(detz, zeta * zeta * det1, 1e-30));
    }
    SuiteResult {
        name: "zeta-scaling",
        passed: max_err <= tol,
        cases: samples,
        max_err,
        tolerance: tol,
        detail: "det Δ scales exactly as ζ²".into(),
    }
}

/// det Δ is constant over yaw at fixed (θ, φ, ζ).
pub fn psi_invariance(samples: usize, seed: u64) -> SuiteResult {
    let tol = 1e-9;
    let p = QuadParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let grid = 64usize;
    for _ in 0..samples {
        let mut s = random_state(&mut rng);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut mag = 0.0f64;
        for k in 0..grid {
            s.psi = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
            let det = delta_yawpos(&s, &p).expect("in-domain").det;
            lo = lo.min(det);
            hi = hi.max(det);
            mag = mag.max(det.abs());
        }
        max_err = max_err.max((hi - lo) / mag.max(1e-30));
    }
    SuiteResult {
        name: "psi-invariance",
        passed: max_err <= tol,
        cases: samples * grid,
        max_err,
        tolerance: tol,
        detail: "det Δ constant over a 64-point yaw grid".into(),
    }
}

/// |det Δ| of the attitude-altitude mode equals |cos φ|·d³/(m·Ix·Iy·Iz).
pub fn altatt_det(samples: usize, seed: u64) -> SuiteResult {
    let tol = 1e-9;
    let p = QuadParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let base = p.d.powi(3) / (p.m * p.ix * p.iy * p.iz);
    for _ in 0..samples {
        let s = random_state(&mut rng);
        let sys = delta_altatt(&s, &p).expect("in-domain");
        let expect = s.phi.cos().abs() * base;
        max_err = max_err.max(rel_err(sys.det.abs(), expect, 1e-30));
    }
    SuiteResult {
        name: "altatt-det",
        passed: max_err <= tol,
        cases: samples,
        max_err,
        tolerance: tol,
        detail: "|det| = |cos φ|·d³/(m·Ix·Iy·Iz), full rank for cos φ ≠ 0".into(),
    }
}

/// Self-convergence order of the integrator, plus exactness on polynomial
/// dynamics (free fall, thrust chain).
pub fn rk4_order() -> SuiteResult {
    let p = QuadParams::default();
    let s = State14 {
        psi: 0.2,
        theta: 0.3,
        phi: 0.1,
        vx: 0.5,
        zeta: 9.81,
        xi: 0.2,
        p: 0.3,
        q: -0.2,
        r: 0.4,
        ..State14::default()
    };
    let u = VirtualInput::from_array([0.5, 0.02, -0.03, 0.01]);
    let horizon = 0.4;
    let integrate = |n: usize| -> [f64; 14] {
        let dt = horizon / n as f64;
        let mut st = s;
        for _ in 0..n {
            st = rk4_step(&st, &u, &p, dt).expect("in-domain");
        }
        st.to_array()
    };
    let reference = integrate(4096);
    let err = |n: usize| -> f64 {
        integrate(n)
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (e1, e2) = (err(8), err(16));
    let slope = (e1 / e2).log2();

    let free = rk4_step(&State14::default(), &VirtualInput::zero(), &p, 1.0).expect("in-domain");
    let free_err = (free.z - 4.905).abs().max((free.vz - 9.81).abs());
    let chain = rk4_step(
        &State14::hover(&p),
        &VirtualInput::from_array([1.0, 0.0, 0.0, 0.0]),
        &p,
        1.0,
    )
    .expect("in-domain");
    let chain_err = (chain.xi - 1.0)
        .abs()
        .max((chain.zeta - (p.m * p.g + 0.5)).abs());

    let slope_ok = (slope - 4.0).abs() <= 0.4;
    let exact_ok = free_err <= 1e-12 && chain_err <= 1e-12;
    SuiteResult {
        name: "rk4-order",
        passed: slope_ok && exact_ok,
        cases: 3,
        max_err: (slope - 4.0).abs(),
        tolerance: 0.4,
        detail: format!(
            "convergence slope {slope:.3}; polynomial-dynamics error {:.1e}",
            free_err.max(chain_err)
        ),
    }
}

/// Integrate the drift flow to a (possibly negative) target time with many
/// small RK4 sub-steps.
fn drift_sample(s: &State14, p: &QuadParams, t_target: f64, n_sub: usize) -> Result<State14> {
    let dt = t_target / n_sub as f64;
    let zero = VirtualInput::zero();
    let mut y = s.to_array();
    for _ in 0..n_sub {
        let axpy = |a: &[f64; 14], h: f64, k: &[f64; 14]| -> [f64; 14] {
            std::array::from_fn(|i| a[i] + h * k[i])
        };
        let s0 = State14::from_array(y);
        let k1 = state_derivative(&s0, &zero, p)?;
        let k2 = state_derivative(&State14::from_array(axpy(&y, dt / 2.0, &k1)), &zero, p)?;
        let k3 = state_derivative(&State14::from_array(axpy(&y, dt / 2.0, &k2)), &zero, p)?;
        let k4 = state_derivative(&State14::from_array(axpy(&y, dt, &k3)), &zero, p)?;
        y = std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    Ok(State14::from_array(y))
}

/// Symmetric finite-difference estimate of the k-th derivative from samples
/// at multiples of `h`, Richardson-extrapolated once (fourth-order overall).
/// `f[j]` holds the sample at `(j − 4)·h/2` for j = 0..=8.
fn fd_derivative(f: &[f64; 9], h: f64, k: usize) -> f64 {
    let at = |steps: i32| f[(4 + steps) as usize]; // multiples of h/2
    let d = |hh: f64, stride: i32| -> f64 {
        let s = stride;
        match k {
            1 => (at(s) - at(-s)) / (2.0 * hh),
            2 => (at(-s) - 2.0 * at(0) + at(s)) / (hh * hh),
            3 => (-at(-2 * s) + 2.0 * at(-s) - 2.0 * at(s) + at(2 * s)) / (2.0 * hh.powi(3)),
            4 => (at(-2 * s) - 4.0 * at(-s) + 6.0 * at(0) - 4.0 * at(s) + at(2 * s)) / hh.powi(4),
            _ => unreachable!(),
        }
    };
    let coarse = d(h, 2);
    let fine = d(h / 2.0, 1);
    (4.0 * fine - coarse) / 3.0
}

/// Jet-computed Lie derivatives vs central finite differences of the output
/// along an exactly integrated drift trajectory.
///
/// A fixed stencil spacing cannot serve every draw: fourth-difference
/// roundoff grows as ε/h⁴ (binding when the derivative is small) while
/// truncation grows as (h·λ)⁴ for dynamics of local rate λ (binding when the
/// state is fast). Each comparison therefore takes the best-agreeing spacing
/// from a small ladder; the jet side is step-free and exact throughout.
pub fn fd_flow(samples: usize, seed: u64) -> SuiteResult {
    let tol = 1e-5;
    let p = QuadParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ladder = [0.04, 0.02, 0.01, 0.005];
    let n_sub_per_half = 16;
    let mut max_err = 0.0f64;
    let mut cases = 0usize;

    let outputs = [
        (Output::X, 4usize),
        (Output::Y, 4),
        (Output::Z, 4),
        (Output::Psi, 2),
        (Output::Theta, 2),
        (Output::Phi, 2),
    ];

    'outer: for _ in 0..samples {
        // Tamer draw than the Δ comparison so the ±2h flow stays in-domain
        // and resolvable by the stencil.
        let mut s = random_state(&mut rng);
        s.theta = s.theta.clamp(-1.0, 1.0);
        s.phi = s.phi.clamp(-1.0, 1.0);
        s.p = s.p.clamp(-1.5, 1.5);
        s.q = s.q.clamp(-1.5, 1.5);
        s.r = s.r.clamp(-1.5, 1.5);

        // Sample the flow at (j − 4)·h/2 for j = 0..=8, per ladder step.
        let mut flows = [[[0.0f64; 14]; 9]; 4];
        for (l, &h) in ladder.iter().enumerate() {
            for (j, slot) in flows[l].iter_mut().enumerate() {
                let t = (j as f64 - 4.0) * h / 2.0;
                let n = (n_sub_per_half * (j as i64 - 4).unsigned_abs() as usize).max(1);
                match drift_sample(&s, &p, t, n) {
                    Ok(st) => *slot = st.to_array(),
                    Err(_) => continue 'outer,
                }
            }
        }

        for &(out, kmax) in &outputs {
            let Ok(chain) = flow_taylor(out, &s, &p, kmax) else {
                continue 'outer;
            };
            let hi = out.state_index();
            for k in 1..=kmax {
                let err = ladder
                    .iter()
                    .enumerate()
                    .map(|(l, &h)| {
                        let series: [f64; 9] = std::array::from_fn(|j| flows[l][j][hi]);
                        rel_err(chain.values[k], fd_derivative(&series, h, k), 1.0)
                    })
                    .fold(f64::INFINITY, f64::min);
                max_err = max_err.max(err);
                cases += 1;
            }
        }
    }

    SuiteResult {
        name: "fd-flow",
        passed: max_err <= tol,
        cases,
        max_err,
        tolerance: tol,
        detail: "jet chains vs finite differences along the drift flow".into(),
    }
}
