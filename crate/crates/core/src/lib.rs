//! Quadrotor dynamic-feedback-linearization laboratory.
//!
//! The crate builds the augmented quadrotor model whose total thrust runs
//! through a double integrator, assembles the yaw-position decoupling matrix
//! by two independent routes (closed-form coefficient algebra and a
//! truncated-Taylor Lie-derivative engine), maps where that matrix actually
//! loses invertibility against where a published indicator function says it
//! should, and simulates switching between the yaw-position and
//! attitude-altitude feedback-linearizing controllers.
//!
//! Modules:
//!
//! * [`model`] — augmented dynamics: drift field, constant input fields,
//!   thrust-axis direction cosines.
//! * [`jet`] — truncated-Taylor and dual-number arithmetic.
//! * [`liederiv`] — iterated Lie derivatives and input couplings by jet
//!   propagation; the oracle for every closed-form coefficient.
//! * [`decoupling`] — the closed-form yaw-position decoupling system with
//!   determinant/condition diagnostics and guarded inversion.
//! * [`singularity`] — grid scans of the singular-zone indicator and of the
//!   determinant oracle, marching-squares contours, discrepancy reports.
//! * [`control`] — outer-loop pole placement and the feedback-linearizing
//!   laws for both output modes.
//! * [`supervisor`] — the attitude-box switching policy.
//! * [`sim`] — deterministic fixed-step RK4 scenario runner with full
//!   time-series and event logging.
//! * [`verify`] — seeded cross-examination suites behind the CLI `verify`
//!   command.

// Index-coupled recurrences (Cauchy products, pivoted elimination) read
// better with explicit indices than with enumerate/zip chains.
#![allow(clippy::needless_range_loop)]

pub mod control;
pub mod decoupling;
pub mod error;
pub mod jet;
pub mod liederiv;
pub mod linalg;
pub mod model;
pub mod sim;
pub mod singularity;
pub mod supervisor;
pub mod verify;

pub use control::{
    delta_altatt, fl_law, fl_law_with_system, mode_system, outer_loop_v, GainSet, Mode,
    ReferenceSet,
};
pub use decoupling::{
    delta_yawpos, invert_delta, ma_yawpos, mno_coefficients, yawpos_system, CoefficientSet,
    DecouplingSystem,
};
pub use error::{Error, Result};
pub use liederiv::{flow_taylor, input_coupling, numeric_row, LieChain, Output};
pub use model::{
    drift_field, state_derivative, thrust_axis, QuadParams, State14, StateDerivative, VirtualInput,
};
pub use sim::{rk4_step, run_scenario, Policy, Scenario, TerminationCause, TimeSeries};
pub use singularity::{
    discrepancy_report, s_value, scan_grid, zero_contour, CellClass, ContourSet, DiscrepancyReport,
    GridAxis, GridScan, ScanKind,
};
pub use supervisor::{classify, step_mode, ZoneSpec};
