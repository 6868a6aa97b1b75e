//! Singular-zone mapping over the attitude plane.
//!
//! Two scalar fields are scanned over a (θ, φ) grid:
//!
//! * the claimed singular-zone indicator
//!   `S(θ, φ) = −1 + cos²θ·cos²φ − cos²θ·cosφ·sinφ`, whose zero set is the
//!   published description of where the yaw-position decoupling matrix is
//!   said to lose rank, and
//! * the direct determinant oracle: det Δ evaluated from the closed form at
//!   a state with the grid attitude, fixed yaw and thrust, and all rates and
//!   velocities zero (none of which enter Δ).
//!
//! A zero-level contour is extracted by marching squares, and a per-cell
//! discrepancy report classifies where the two fields agree about
//! singularity. The report is the instrument that adjudicates the indicator
//! claim against the oracle.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::decoupling::delta_yawpos;
use crate::error::{Error, Result};
use crate::linalg::row_norm_product;
use crate::model::{QuadParams, State14};

/// Default number of samples per grid axis.
pub const DEFAULT_RESOLUTION: usize = 301;
/// Default symmetric half-range of the attitude grid (rad).
pub const DEFAULT_RANGE: f64 = 1.5;
/// Default tolerance on |S| below which a cell counts as singular under S.
pub const DEFAULT_S_TOL: f64 = 1e-9;
/// Default tolerance on |det|, relative to the product of Δ row norms.
pub const DEFAULT_DET_TOL: f64 = 1e-9;

/// The claimed singular-zone indicator.
pub fn s_value(theta: f64, phi: f64) -> f64 {
    let ct = theta.cos();
    let (sf, cf) = phi.sin_cos();
    -1.0 + ct * ct * cf * cf - ct * ct * cf * sf
}

/// One uniformly sampled axis: `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Config(format!(
                "axis bounds must be finite with min < max, got [{min}, {max}]"
            )));
        }
        if count < 2 {
            return Err(Error::Config(format!(
                "axis needs at least 2 samples, got {count}"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn symmetric(half_range: f64, count: usize) -> Result<Self> {
        Self::new(-half_range, half_range, count)
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

/// Which field a [`GridScan`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    SFunction,
    DetOracle,
}

/// A scalar field sampled on a (θ, φ) grid, θ-major.
///
/// For [`ScanKind::DetOracle`], cells outside the Euler domain hold NaN and
/// are counted in `unevaluated`; `scales` carries the per-cell product of Δ
/// row norms used for relative singularity thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub theta: GridAxis,
    pub phi: GridAxis,
    pub kind: ScanKind,
    /// Yaw fixed during a determinant scan (ignored by S).
    pub psi: f64,
    /// Thrust fixed during a determinant scan (ignored by S).
    pub zeta: f64,
    /// `values[i_theta * phi.count + i_phi]`.
    pub values: Vec<f64>,
    pub scales: Option<Vec<f64>>,
    pub unevaluated: usize,
}

impl GridScan {
    pub fn at(&self, it: usize, ip: usize) -> f64 {
        self.values[it * self.phi.count + ip]
    }

    /// Grid indices of the cell whose sample point is nearest (θ, φ).
    pub fn nearest_index(&self, theta: f64, phi: f64) -> (usize, usize) {
        let clamp = |axis: &GridAxis, v: f64| -> usize {
            let i = ((v - axis.min) / axis.step()).round();
            (i.max(0.0) as usize).min(axis.count - 1)
        };
        (clamp(&self.theta, theta), clamp(&self.phi, phi))
    }
}

/// Scan one field over the grid.
///
/// The determinant oracle evaluates det Δ at the state whose attitude is the
/// grid point, with the given fixed yaw and thrust and everything else zero;
/// Δ depends on nothing else. Out-of-domain cells are marked NaN, not fatal.
pub fn scan_grid(
    theta: GridAxis,
    phi: GridAxis,
    kind: ScanKind,
    fixed_psi: f64,
    fixed_zeta: f64,
    p: &QuadParams,
) -> Result<GridScan> {
    if kind == ScanKind::DetOracle && fixed_zeta == 0.0 {
        return Err(Error::Config(
            "determinant scans require a nonzero thrust state ζ".into(),
        ));
    }
    let n = theta.count * phi.count;
    let mut values = vec![f64::NAN; n];
    let mut scales = vec![f64::NAN; n];
    let mut unevaluated = 0usize;

    for it in 0..theta.count {
        let tv = theta.value(it);
        for ip in 0..phi.count {
            let fv = phi.value(ip);
            let k = it * phi.count + ip;
            match kind {
                ScanKind::SFunction => values[k] = s_value(tv, fv),
                ScanKind::DetOracle => {
                    let s = State14 {
                        psi: fixed_psi,
                        theta: tv,
                        phi: fv,
                        zeta: fixed_zeta,
                        ..State14::default()
                    };
                    match delta_yawpos(&s, p) {
                        Ok(sys) => {
                            values[k] = sys.det;
                            scales[k] = row_norm_product(&sys.delta);
                        }
                        Err(Error::Domain { .. }) => unevaluated += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }

    Ok(GridScan {
        theta,
        phi,
        kind,
        psi: fixed_psi,
        zeta: fixed_zeta,
        values,
        scales: match kind {
            ScanKind::DetOracle => Some(scales),
            ScanKind::SFunction => None,
        },
        unevaluated,
    })
}

/// Zero-level polylines in (θ, φ) coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContourSet {
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl ContourSet {
    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }

    /// Smallest Euclidean distance from any vertex to a point.
    pub fn min_distance_to(&self, theta: f64, phi: f64) -> f64 {
        self.polylines
            .iter()
            .flatten()
            .map(|&(t, f)| ((t - theta).powi(2) + (f - phi).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A contour vertex lies on a unique grid edge; identifying vertices by the
/// edge lets segments be joined exactly, with no floating-point hashing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EdgeKey {
    it: usize,
    ip: usize,
    /// false: edge from (it, ip) to (it+1, ip); true: to (it, ip+1).
    along_phi: bool,
}

/// Extract the zero level set by marching squares with linear interpolation
/// along cell edges. Cells touching NaN samples are skipped. Errors with
/// [`Error::EmptyContour`] when no sign change exists anywhere.
pub fn zero_contour(scan: &GridScan) -> Result<ContourSet> {
    use std::collections::HashMap;

    let nt = scan.theta.count;
    let np = scan.phi.count;
    let point = |key: &EdgeKey| -> (f64, f64) {
        let (va, vb, a, b) = if key.along_phi {
            (
                scan.at(key.it, key.ip),
                scan.at(key.it, key.ip + 1),
                (scan.theta.value(key.it), scan.phi.value(key.ip)),
                (scan.theta.value(key.it), scan.phi.value(key.ip + 1)),
            )
        } else {
            (
                scan.at(key.it, key.ip),
                scan.at(key.it + 1, key.ip),
                (scan.theta.value(key.it), scan.phi.value(key.ip)),
                (scan.theta.value(key.it + 1), scan.phi.value(key.ip)),
            )
        };
        let t = if va == vb { 0.5 } else { va / (va - vb) };
        let t = t.clamp(0.0, 1.0);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    };

    // Per-cell segments as (edge, edge) pairs.
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for it in 0..nt - 1 {
        for ip in 0..np - 1 {
            let v = [
                scan.at(it, ip),
                scan.at(it + 1, ip),
                scan.at(it + 1, ip + 1),
                scan.at(it, ip + 1),
            ];
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            // Corner bit set when the sample is non-negative.
            let mut case = 0usize;
            for (b, &val) in v.iter().enumerate() {
                if val >= 0.0 {
                    case |= 1 << b;
                }
            }
            if case == 0 || case == 0b1111 {
                continue;
            }
            // Cell edges: 0 bottom (θ side at ip), 1 right (φ side at it+1),
            // 2 top (θ side at ip+1), 3 left (φ side at it).
            let e = [
                EdgeKey {
                    it,
                    ip,
                    along_phi: false,
                },
                EdgeKey {
                    it: it + 1,
                    ip,
                    along_phi: true,
                },
                EdgeKey {
                    it,
                    ip: ip + 1,
                    along_phi: false,
                },
                EdgeKey {
                    it,
                    ip,
                    along_phi: true,
                },
            ];
            let mut push = |a: usize, b: usize| segments.push((e[a], e[b]));
            match case {
                0b0001 | 0b1110 => push(3, 0),
                0b0010 | 0b1101 => push(0, 1),
                0b0100 | 0b1011 => push(1, 2),
                0b1000 | 0b0111 => push(2, 3),
                0b0011 | 0b1100 => push(3, 1),
                0b0110 | 0b1001 => push(0, 2),
                0b0101 | 0b1010 => {
                    // Saddle: disambiguate with the cell-center average.
                    let center = v.iter().sum::<f64>() / 4.0;
                    let corners_pos = case == 0b0101;
                    if (center >= 0.0) == corners_pos {
                        push(3, 0);
                        push(1, 2);
                    } else {
                        push(0, 1);
                        push(2, 3);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    if segments.is_empty() {
        return Err(Error::EmptyContour);
    }

    // Stitch segments into polylines: adjacency by exact edge identity.
    let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (i, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(i);
        adj.entry(b).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a0, b0) = segments[start];
        let mut chain = vec![a0, b0];
        // Extend forward from the tail, then backward from the head.
        for dir in 0..2 {
            loop {
                let tip = if dir == 0 {
                    *chain.last().unwrap()
                } else {
                    chain[0]
                };
                let next = adj
                    .get(&tip)
                    .and_then(|ids| ids.iter().find(|&&i| !used[i]).copied());
                let Some(i) = next else { break };
                used[i] = true;
                let (a, b) = segments[i];
                let other = if a == tip { b } else { a };
                if dir == 0 {
                    chain.push(other);
                } else {
                    chain.insert(0, other);
                }
            }
        }
        polylines.push(chain.iter().map(&point).collect());
    }

    Ok(ContourSet { polylines })
}

/// Per-cell agreement classification between the indicator and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    AgreeNonsingular,
    AgreeSingular,
    Disagree,
    /// Oracle not evaluated at this cell (outside the Euler domain).
    Unevaluated,
}

impl CellClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CellClass::AgreeNonsingular => "AGREE_NONSINGULAR",
            CellClass::AgreeSingular => "AGREE_SINGULAR",
            CellClass::Disagree => "DISAGREE",
            CellClass::Unevaluated => "UNEVALUATED",
        }
    }
}

/// The adjudication of the indicator zero set against the determinant
/// oracle, cell by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub theta: GridAxis,
    pub phi: GridAxis,
    pub psi: f64,
    pub zeta: f64,
    pub s_tol: f64,
    pub det_tol: f64,
    /// θ-major, one class per grid cell.
    pub classes: Vec<CellClass>,
    pub s_values: Vec<f64>,
    pub det_values: Vec<f64>,
    pub agree_nonsingular: usize,
    pub agree_singular: usize,
    pub disagree: usize,
    pub unevaluated: usize,
}

impl DiscrepancyReport {
    pub fn class_at(&self, it: usize, ip: usize) -> CellClass {
        self.classes[it * self.phi.count + ip]
    }

    pub fn summary(&self) -> String {
        format!(
            "agree_nonsingular={} agree_singular={} disagree={} unevaluated={}",
            self.agree_nonsingular, self.agree_singular, self.disagree, self.unevaluated
        )
    }
}

/// Classify every cell: singular under S when |S| ≤ s_tol; singular under
/// the oracle when |det| ≤ det_tol × (product of Δ row norms at the cell).
pub fn discrepancy_report(
    s_scan: &GridScan,
    det_scan: &GridScan,
    s_tol: f64,
    det_tol: f64,
) -> Result<DiscrepancyReport> {
    if s_scan.kind != ScanKind::SFunction || det_scan.kind != ScanKind::DetOracle {
        return Err(Error::GridMismatch(
            "expected an S-function scan and a determinant scan".into(),
        ));
    }
    if s_scan.theta != det_scan.theta || s_scan.phi != det_scan.phi {
        return Err(Error::GridMismatch(format!(
            "axes differ: S over θ[{}, {}]×{} φ[{}, {}]×{}, det over θ[{}, {}]×{} φ[{}, {}]×{}",
            s_scan.theta.min,
            s_scan.theta.max,
            s_scan.theta.count,
            s_scan.phi.min,
            s_scan.phi.max,
            s_scan.phi.count,
            det_scan.theta.min,
            det_scan.theta.max,
            det_scan.theta.count,
            det_scan.phi.min,
            det_scan.phi.max,
            det_scan.phi.count,
        )));
    }
    let scales = det_scan
        .scales
        .as_ref()
        .ok_or_else(|| Error::GridMismatch("determinant scan carries no scale data".into()))?;

    let n = s_scan.values.len();
    let mut classes = Vec::with_capacity(n);
    let (mut ans, mut asg, mut dis, mut une) = (0usize, 0usize, 0usize, 0usize);
    for k in 0..n {
        let det = det_scan.values[k];
        let class = if det.is_nan() {
            une += 1;
            CellClass::Unevaluated
        } else {
            let s_singular = s_scan.values[k].abs() <= s_tol;
            let det_singular = det.abs() <= det_tol * scales[k];
            match (s_singular, det_singular) {
                (false, false) => {
                    ans += 1;
                    CellClass::AgreeNonsingular
                }
                (true, true) => {
                    asg += 1;
                    CellClass::AgreeSingular
                }
                _ => {
                    dis += 1;
                    CellClass::Disagree
                }
            }
        };
        classes.push(class);
    }

    Ok(DiscrepancyReport {
        theta: s_scan.theta,
        phi: s_scan.phi,
        psi: det_scan.psi,
        zeta: det_scan.zeta,
        s_tol,
        det_tol,
        classes,
        s_values: s_scan.values.clone(),
        det_values: det_scan.values.clone(),
        agree_nonsingular: ans,
        agree_singular: asg,
        disagree: dis,
        unevaluated: une,
    })
}

fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Write a grid as CSV: header `theta,phi,value`, θ-major rows, 17
/// significant digits.
pub fn write_grid_csv(scan: &GridScan, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str("theta,phi,value\n");
    for it in 0..scan.theta.count {
        for ip in 0..scan.phi.count {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt17(scan.theta.value(it)),
                fmt17(scan.phi.value(ip)),
                fmt17(scan.at(it, ip))
            );
        }
    }
    fs::write(path, out)
}

/// Write contours as CSV: `polyline_id,theta,phi`.
pub fn write_contour_csv(contours: &ContourSet, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str("polyline_id,theta,phi\n");
    for (id, line) in contours.polylines.iter().enumerate() {
        for &(t, f) in line {
            let _ = writeln!(out, "{},{},{}", id, fmt17(t), fmt17(f));
        }
    }
    fs::write(path, out)
}

/// Write the discrepancy report as CSV:
/// `theta,phi,s_value,det_value,classification`, one row per cell, followed
/// by a `#`-prefixed summary line of counts.
pub fn write_discrepancy_csv(report: &DiscrepancyReport, path: &Path) -> std::io::Result<()> {
    let file = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "theta,phi,s_value,det_value,classification")?;
    for it in 0..report.theta.count {
        for ip in 0..report.phi.count {
            let k = it * report.phi.count + ip;
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt17(report.theta.value(it)),
                fmt17(report.phi.value(ip)),
                fmt17(report.s_values[k]),
                fmt17(report.det_values[k]),
                report.classes[k].as_str()
            )?;
        }
    }
    writeln!(w, "# {}", report.summary())?;
    w.flush()
}
