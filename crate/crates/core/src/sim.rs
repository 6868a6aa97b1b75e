//! Deterministic fixed-step simulation of closed-loop scenarios.
//!
//! Each step: (1) the supervisor selects the active mode (or a fixed mode
//! runs throughout), (2) the active feedback-linearization law computes ū
//! from the current state, (3) a classical RK4 step advances the dynamics
//! with ū held constant (zero-order hold). Control is recomputed once per
//! step, not per RK4 stage, mirroring discrete controller practice.
//!
//! Runs terminate at `t_final`, or early when the active decoupling matrix
//! is refused as singular, or when the state diverges (any component beyond
//! [`DIVERGENCE_BOUND`] or the attitude leaving the open Euler domain).
//! Early termination is a logged outcome, not an error. Identical scenarios
//! produce bit-identical time series.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{fl_law_with_system, mode_system, GainSet, Mode, ReferenceSet};
use crate::error::{Error, Result};
use crate::model::{state_derivative, QuadParams, State14, VirtualInput, DIVERGENCE_BOUND};
use crate::supervisor::{step_mode, ZoneSpec};

/// Mode-selection policy of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Policy {
    /// One controller runs for the whole flight.
    Fixed { mode: Mode },
    /// The supervisor reclassifies the attitude every step.
    Switching,
}

/// Per-mode references; only the modes a policy can activate are required.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioRefs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yawpos: Option<YawPosRefs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub altatt: Option<AltAttRefs>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YawPosRefs {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltAttRefs {
    pub z: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl From<YawPosRefs> for ReferenceSet {
    fn from(r: YawPosRefs) -> Self {
        ReferenceSet::YawPosition {
            x: r.x,
            y: r.y,
            z: r.z,
            psi: r.psi,
        }
    }
}

impl From<AltAttRefs> for ReferenceSet {
    fn from(r: AltAttRefs) -> Self {
        ReferenceSet::AttitudeAltitude {
            z: r.z,
            phi: r.phi,
            theta: r.theta,
            psi: r.psi,
        }
    }
}

/// Explicit per-mode gain chains, alternative to a uniform pole.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioGains {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yawpos: Option<[Vec<f64>; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub altatt: Option<[Vec<f64>; 4]>,
}

/// A complete simulation description. The on-disk form is JSON with keys
/// `params`, `initial_state` (14-array), `policy`, `zone`, `refs`,
/// `poles` or `gains`, `dt`, `t_final`, `log_every`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub params: Option<QuadParams>,
    pub initial_state: State14,
    pub policy: Policy,
    #[serde(default)]
    pub zone: Option<ZoneSpec>,
    pub refs: ScenarioRefs,
    /// Uniform pole location (< 0) applied to every chain of every mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<f64>,
    /// Explicit gains; exactly one of `poles`/`gains` must be present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<ScenarioGains>,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
}

fn default_log_every() -> usize {
    1
}

/// Everything [`run_scenario`] needs, validated and resolved.
struct Prepared {
    params: QuadParams,
    initial: State14,
    policy: Policy,
    zone: ZoneSpec,
    yawpos: Option<(ReferenceSet, GainSet)>,
    altatt: Option<(ReferenceSet, GainSet)>,
    dt: f64,
    steps: usize,
    log_every: usize,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario parse: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn prepare(&self) -> Result<Prepared> {
        let params = self.params.unwrap_or_default();
        params.validate()?;
        if !self.initial_state.is_finite() {
            return Err(Error::Config("initial state must be finite".into()));
        }
        if self.initial_state.zeta == 0.0 {
            return Err(Error::Config(
                "initial ζ must be nonzero: the feedback-linearizing law is active from t = 0"
                    .into(),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::Config(format!(
                "t_final must be at least dt, got {}",
                self.t_final
            )));
        }
        if self.log_every == 0 {
            return Err(Error::Config("log_every must be at least 1".into()));
        }
        let zone = self.zone.unwrap_or_default();
        zone.validate()?;

        let gain_for = |mode: Mode| -> Result<Option<GainSet>> {
            match (&self.poles, &self.gains) {
                (Some(_), Some(_)) => {
                    Err(Error::Config("give either poles or gains, not both".into()))
                }
                (None, None) => Err(Error::Config("give poles or gains".into())),
                (Some(pole), None) => GainSet::all_poles_at(mode, *pole).map(Some),
                (None, Some(g)) => {
                    let chains = match mode {
                        Mode::YawPosition => &g.yawpos,
                        Mode::AttitudeAltitude => &g.altatt,
                    };
                    chains
                        .as_ref()
                        .map(|c| GainSet::new(mode, c.clone()))
                        .transpose()
                }
            }
        };

        let needs_yawpos = matches!(
            self.policy,
            Policy::Switching
                | Policy::Fixed {
                    mode: Mode::YawPosition
                }
        );
        let needs_altatt = matches!(
            self.policy,
            Policy::Switching
                | Policy::Fixed {
                    mode: Mode::AttitudeAltitude
                }
        );

        let build = |needed: bool,
                     refs: Option<ReferenceSet>,
                     gains: Option<GainSet>,
                     name: &str|
         -> Result<Option<(ReferenceSet, GainSet)>> {
            if !needed {
                return Ok(None);
            }
            let refs = refs.ok_or_else(|| Error::Config(format!("policy requires refs.{name}")))?;
            if !refs.is_finite() {
                return Err(Error::Config(format!("refs.{name} must be finite")));
            }
            let gains =
                gains.ok_or_else(|| Error::Config(format!("policy requires gains for {name}")))?;
            Ok(Some((refs, gains)))
        };

        let yawpos = build(
            needs_yawpos,
            self.refs.yawpos.map(Into::into),
            gain_for(Mode::YawPosition)?,
            "yawpos",
        )?;
        let altatt = build(
            needs_altatt,
            self.refs.altatt.map(Into::into),
            gain_for(Mode::AttitudeAltitude)?,
            "altatt",
        )?;

        let steps = (self.t_final / self.dt).round().max(1.0) as usize;
        Ok(Prepared {
            params,
            initial: self.initial_state,
            policy: self.policy,
            zone,
            yawpos,
            altatt,
            dt: self.dt,
            steps,
            log_every: self.log_every,
        })
    }

    /// Validate without running.
    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationCause {
    /// The run reached `t_final`.
    Converged,
    /// The active decoupling matrix was refused as singular.
    Singular,
    /// A state component exceeded the divergence bound, or the attitude left
    /// the open Euler domain.
    Diverged,
}

impl TerminationCause {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationCause::Converged => "CONVERGED",
            TerminationCause::Singular => "SINGULAR",
            TerminationCause::Diverged => "DIVERGED",
        }
    }
}

/// One logged sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub state: State14,
    pub mode: Mode,
    pub u: VirtualInput,
    /// Determinant of the active mode's Δ at this state (NaN if it could
    /// not be evaluated, e.g. attitude outside the domain).
    pub det: f64,
}

/// Logged events: controller switches and the final termination.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Switch {
        t: f64,
        from: Mode,
        to: Mode,
    },
    Termination {
        t: f64,
        cause: TerminationCause,
        detail: String,
    },
}

/// Full record of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub rows: Vec<Row>,
    pub events: Vec<Event>,
}

impl TimeSeries {
    pub fn switch_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Switch { .. }))
            .count()
    }

    pub fn termination(&self) -> Option<(f64, TerminationCause, &str)> {
        self.events.iter().find_map(|e| match e {
            Event::Termination { t, cause, detail } => Some((*t, *cause, detail.as_str())),
            _ => None,
        })
    }

    pub fn final_row(&self) -> &Row {
        self.rows
            .last()
            .expect("a run always logs at least one row")
    }
}

/// One classical RK4 step of the full dynamics with the input held constant.
pub fn rk4_step(s: &State14, u: &VirtualInput, p: &QuadParams, dt: f64) -> Result<State14> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let y0 = s.to_array();
    let axpy = |a: &[f64; 14], h: f64, k: &[f64; 14]| -> [f64; 14] {
        std::array::from_fn(|i| a[i] + h * k[i])
    };

    let k1 = state_derivative(s, u, p)?;
    let k2 = state_derivative(&State14::from_array(axpy(&y0, dt / 2.0, &k1)), u, p)?;
    let k3 = state_derivative(&State14::from_array(axpy(&y0, dt / 2.0, &k2)), u, p)?;
    let k4 = state_derivative(&State14::from_array(axpy(&y0, dt, &k3)), u, p)?;

    let y1 =
        std::array::from_fn(|i| y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    Ok(State14::from_array(y1))
}

fn diverged(s: &State14) -> Option<String> {
    if s.max_abs() > DIVERGENCE_BOUND {
        return Some(format!(
            "state magnitude {:.3e} exceeded the bound {DIVERGENCE_BOUND:.0e}",
            s.max_abs()
        ));
    }
    if s.check_attitude_domain().is_err() {
        return Some(format!(
            "attitude (θ = {:.4}, φ = {:.4}) left the open Euler domain",
            s.theta, s.phi
        ));
    }
    None
}

/// Run a scenario to completion, logging rows every `log_every` steps plus
/// the initial and final samples, and every switch/termination event.
pub fn run_scenario(sc: &Scenario) -> Result<TimeSeries> {
    let prep = sc.prepare()?;
    let p = prep.params;
    let dt = prep.dt;

    let mut rows: Vec<Row> = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    let mut state = prep.initial;

    // The supervisor's prior at t = 0 is the yaw-position controller; the
    // initial classification is not logged as a switch.
    let mut mode = match prep.policy {
        Policy::Fixed { mode } => mode,
        Policy::Switching => step_mode(&state, &prep.zone, Mode::YawPosition).0,
    };

    let refs_gains = |m: Mode| -> &(ReferenceSet, GainSet) {
        match m {
            Mode::YawPosition => prep.yawpos.as_ref().expect("validated"),
            Mode::AttitudeAltitude => prep.altatt.as_ref().expect("validated"),
        }
    };

    let det_probe = |m: Mode, s: &State14| -> f64 {
        mode_system(m, s, &p).map(|sys| sys.det).unwrap_or(f64::NAN)
    };

    let terminate = |rows: &mut Vec<Row>,
                     events: &mut Vec<Event>,
                     t: f64,
                     state: State14,
                     mode: Mode,
                     u: VirtualInput,
                     det: f64,
                     cause: TerminationCause,
                     detail: String| {
        if rows.last().map(|r| r.t) != Some(t) {
            rows.push(Row {
                t,
                state,
                mode,
                u,
                det,
            });
        }
        events.push(Event::Termination { t, cause, detail });
    };

    for step in 0..prep.steps {
        let t = step as f64 * dt;

        if let Policy::Switching = prep.policy {
            let (next, switched) = step_mode(&state, &prep.zone, mode);
            if switched && step > 0 {
                events.push(Event::Switch {
                    t,
                    from: mode,
                    to: next,
                });
            }
            mode = next;
        }

        let (refs, gains) = refs_gains(mode);
        let (u, sys) = match fl_law_with_system(&state, &p, refs, gains) {
            Ok(pair) => pair,
            Err(Error::Singular { det, cond }) => {
                terminate(
                    &mut rows,
                    &mut events,
                    t,
                    state,
                    mode,
                    VirtualInput::zero(),
                    det,
                    TerminationCause::Singular,
                    format!("det = {det:.6e}, cond = {cond:.6e}"),
                );
                return Ok(TimeSeries { rows, events });
            }
            Err(Error::Domain { angle, value, .. }) => {
                terminate(
                    &mut rows,
                    &mut events,
                    t,
                    state,
                    mode,
                    VirtualInput::zero(),
                    f64::NAN,
                    TerminationCause::Diverged,
                    format!("attitude left the open Euler domain ({angle} = {value:.4})"),
                );
                return Ok(TimeSeries { rows, events });
            }
            Err(e) => return Err(e),
        };

        if step % prep.log_every == 0 {
            rows.push(Row {
                t,
                state,
                mode,
                u,
                det: sys.det,
            });
        }

        state = match rk4_step(&state, &u, &p, dt) {
            Ok(next) => next,
            Err(Error::Domain { angle, value, .. }) => {
                terminate(
                    &mut rows,
                    &mut events,
                    t,
                    state,
                    mode,
                    u,
                    sys.det,
                    TerminationCause::Diverged,
                    format!("attitude left the open Euler domain mid-step ({angle} = {value:.4})"),
                );
                return Ok(TimeSeries { rows, events });
            }
            Err(e) => return Err(e),
        };

        let t_next = (step + 1) as f64 * dt;
        if let Some(detail) = diverged(&state) {
            terminate(
                &mut rows,
                &mut events,
                t_next,
                state,
                mode,
                u,
                det_probe(mode, &state),
                TerminationCause::Diverged,
                detail,
            );
            return Ok(TimeSeries { rows, events });
        }

        if step + 1 == prep.steps {
            terminate(
                &mut rows,
                &mut events,
                t_next,
                state,
                mode,
                u,
                det_probe(mode, &state),
                TerminationCause::Converged,
                format!("reached t_final = {:.6} s", t_next),
            );
        }
    }

    Ok(TimeSeries { rows, events })
}

fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Write rows as CSV with columns
/// `t,x,y,z,psi,theta,phi,vx,vy,vz,zeta,xi,p,q,r,mode,u1b,u2b,u3b,u4b,det`.
pub fn write_timeseries_csv(ts: &TimeSeries, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str("t,x,y,z,psi,theta,phi,vx,vy,vz,zeta,xi,p,q,r,mode,u1b,u2b,u3b,u4b,det\n");
    for row in &ts.rows {
        let s = row.state.to_array();
        let _ = write!(out, "{}", fmt17(row.t));
        for v in s {
            let _ = write!(out, ",{}", fmt17(v));
        }
        let _ = write!(out, ",{}", row.mode.as_str());
        for v in row.u.to_array() {
            let _ = write!(out, ",{}", fmt17(v));
        }
        let _ = writeln!(out, ",{}", fmt17(row.det));
    }
    fs::write(path, out)
}

/// Write events as CSV `t,kind,detail`.
pub fn write_events_csv(ts: &TimeSeries, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str("t,kind,detail\n");
    for e in &ts.events {
        match e {
            Event::Switch { t, from, to } => {
                let _ = writeln!(
                    out,
                    "{},switch,{}->{}",
                    fmt17(*t),
                    from.as_str(),
                    to.as_str()
                );
            }
            Event::Termination { t, cause, detail } => {
                let _ = writeln!(
                    out,
                    "{},termination,{} ({})",
                    fmt17(*t),
                    cause.as_str(),
                    detail
                );
            }
        }
    }
    fs::write(path, out)
}
