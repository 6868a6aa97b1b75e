//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the dynamics, decoupling, mapping and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An Euler angle is too close to the kinematic singularity at ±π/2.
    #[error("{angle} = {value} rad is within {margin} rad of the Euler singularity at ±π/2")]
    Domain {
        angle: &'static str,
        value: f64,
        margin: f64,
    },

    /// A Lie-derivative order beyond the supported jet degree was requested.
    #[error("derivative order {requested} exceeds the maximum supported order {max}")]
    Order { requested: usize, max: usize },

    /// The decoupling matrix is singular or numerically too ill-conditioned to invert.
    #[error("decoupling matrix is singular (det = {det:e}, cond = {cond:e})")]
    Singular { det: f64, cond: f64 },

    /// Two grids that must share axes do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A zero-contour extraction found no sign change anywhere on the grid.
    #[error("no zero contour: the scanned field has no sign change")]
    EmptyContour,

    /// An invalid configuration value (scenario file, grid axis, gain set, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
