//! Switching supervisor: pick the active controller from the attitude.
//!
//! A rectangular attitude box assigns the attitude-altitude controller;
//! everywhere else the yaw-position controller runs. Box membership is
//! boundary-inclusive. Hysteresis defaults to zero, which reproduces
//! chattering at the boundary when the two controllers disagree; a positive
//! margin widens the box for whichever side currently holds it.

use serde::{Deserialize, Serialize};

use crate::control::Mode;
use crate::error::{Error, Result};
use crate::model::{State14, EPS_PHI};

/// The attitude box assigned to the attitude-altitude controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZoneSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    /// Extra margin (rad) applied to the box while the attitude-altitude
    /// controller is active. Zero reproduces pure zone membership.
    pub hysteresis: f64,
}

impl Default for ZoneSpec {
    /// θ ∈ [−0.5, 0.5], φ ∈ [−π/2 + εφ, 0.2]; the lower roll bound is pulled
    /// inside the open Euler domain. No hysteresis.
    fn default() -> Self {
        Self {
            theta_min: -0.5,
            theta_max: 0.5,
            phi_min: -std::f64::consts::FRAC_PI_2 + EPS_PHI,
            phi_max: 0.2,
            hysteresis: 0.0,
        }
    }
}

impl ZoneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_min < self.theta_max && self.phi_min < self.phi_max) {
            return Err(Error::Config(format!(
                "zone bounds must satisfy min < max on both axes, got θ[{}, {}] φ[{}, {}]",
                self.theta_min, self.theta_max, self.phi_min, self.phi_max
            )));
        }
        if !(self.hysteresis.is_finite() && self.hysteresis >= 0.0) {
            return Err(Error::Config(format!(
                "hysteresis must be non-negative, got {}",
                self.hysteresis
            )));
        }
        Ok(())
    }

    fn contains(&self, theta: f64, phi: f64, margin: f64) -> bool {
        theta >= self.theta_min - margin
            && theta <= self.theta_max + margin
            && phi >= self.phi_min - margin
            && phi <= self.phi_max + margin
    }
}

/// Classify an attitude into the mode that should control it.
///
/// Boundary points belong to the box. With `hysteresis = 0` the result
/// depends only on (θ, φ); with a positive margin the box is expanded by it
/// while `current` is the attitude-altitude controller.
pub fn classify(theta: f64, phi: f64, spec: &ZoneSpec, current: Mode) -> Mode {
    let margin = match current {
        Mode::AttitudeAltitude => spec.hysteresis,
        Mode::YawPosition => 0.0,
    };
    if spec.contains(theta, phi, margin) {
        Mode::AttitudeAltitude
    } else {
        Mode::YawPosition
    }
}

/// One supervisor decision: the new mode and whether it changed.
pub fn step_mode(s: &State14, spec: &ZoneSpec, current: Mode) -> (Mode, bool) {
    let next = classify(s.theta, s.phi, spec, current);
    (next, next != current)
}
