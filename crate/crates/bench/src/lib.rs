//! Shared fixtures for the benchmark targets.

use singzone_core::{QuadParams, State14};

/// A generic in-domain state with every coupling active.
pub fn generic_state() -> State14 {
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

pub fn params() -> QuadParams {
    QuadParams::default()
}
