//! `singzone` — singular-zone mapping, scenario simulation, verification
//! suites and point-wise decoupling-matrix inspection.
//!
//! Every flag can also be set through an environment variable prefixed
//! `SINGZONE_` (for example `SINGZONE_OUT_DIR`). Exit codes: 0 success,
//! 1 I/O failure, 2 usage or validation error, 3 verification failure,
//! 4 singular-point inspection.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use singzone_core::sim::{run_scenario, write_events_csv, write_timeseries_csv, Scenario};
use singzone_core::singularity::{
    discrepancy_report, scan_grid, write_contour_csv, write_discrepancy_csv, write_grid_csv,
    zero_contour, ContourSet, GridAxis, ScanKind, DEFAULT_DET_TOL, DEFAULT_RANGE,
    DEFAULT_RESOLUTION, DEFAULT_S_TOL,
};
use singzone_core::verify::{run_all, run_suite, SUITE_NAMES};
use singzone_core::{mode_system, Error, Mode, QuadParams, State14};

#[derive(Parser)]
#[command(
    name = "singzone",
    about = "Quadrotor feedback-linearization singular-zone laboratory",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the singular-zone indicator (and optionally the determinant
    /// oracle) over an attitude grid, extract the zero contour, and write
    /// CSV exports.
    Singmap(SingmapArgs),
    /// Run a scenario file and write the time series and event log.
    Simulate(SimulateArgs),
    /// Run the seeded verification suites.
    Verify(VerifyArgs),
    /// Print the decoupling system at one state as JSON.
    Delta(DeltaArgs),
}

#[derive(Args)]
struct SingmapArgs {
    /// Symmetric half-range of the θ and φ axes (rad).
    #[arg(long, default_value_t = DEFAULT_RANGE, env = "SINGZONE_RANGE")]
    range: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, env = "SINGZONE_RES")]
    res: usize,
    /// Also scan det Δ and write the discrepancy report.
    #[arg(long, default_value_t = false, env = "SINGZONE_DET_ORACLE")]
    det_oracle: bool,
    /// Fixed yaw for the determinant scan (rad).
    #[arg(long, default_value_t = 0.0, env = "SINGZONE_PSI")]
    psi: f64,
    /// Fixed thrust state for the determinant scan (N); must be nonzero.
    #[arg(long, default_value_t = 9.81, env = "SINGZONE_ZETA")]
    zeta: f64,
    /// |S| at or below this counts as singular under the indicator.
    #[arg(long, default_value_t = DEFAULT_S_TOL, env = "SINGZONE_S_TOL")]
    s_tol: f64,
    /// |det| at or below this times the row-norm product counts as singular.
    #[arg(long, default_value_t = DEFAULT_DET_TOL, env = "SINGZONE_DET_TOL")]
    det_tol: f64,
    #[arg(long, default_value = "./out", env = "SINGZONE_OUT_DIR")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long, env = "SINGZONE_SCENARIO")]
    scenario: PathBuf,
    #[arg(long, default_value = "./out", env = "SINGZONE_OUT_DIR")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Sample budget shared by the suites.
    #[arg(long, default_value_t = 10000, env = "SINGZONE_SAMPLES")]
    samples: usize,
    #[arg(long, default_value_t = 42, env = "SINGZONE_SEED")]
    seed: u64,
    /// Run a single suite by name instead of all of them.
    #[arg(long, env = "SINGZONE_SUITE")]
    suite: Option<String>,
}

#[derive(Args)]
struct DeltaArgs {
    /// Inspect the hover state (level attitude, at rest) instead of --state.
    #[arg(long, default_value_t = false, env = "SINGZONE_HOVER")]
    hover: bool,
    /// Thrust state ζ used with --hover (N).
    #[arg(long, default_value_t = 9.81, env = "SINGZONE_ZETA")]
    zeta: f64,
    /// Full state as 14 comma-separated values
    /// x,y,z,psi,theta,phi,vx,vy,vz,zeta,xi,p,q,r.
    #[arg(long, value_delimiter = ',', env = "SINGZONE_STATE")]
    state: Option<Vec<f64>>,
    /// Output mode: yawpos or altatt.
    #[arg(long, default_value = "yawpos", env = "SINGZONE_MODE")]
    mode: String,
}

/// An error that already knows its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
    fn io(context: &str, err: std::io::Error) -> Self {
        Self {
            code: 1,
            message: format!("{context}: {err}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Singmap(args) => singmap(args),
        Command::Simulate(args) => simulate(args),
        Command::Verify(args) => verify(args),
        Command::Delta(args) => delta(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(&format!("creating {}", dir.display()), e))
}

fn singmap(args: SingmapArgs) -> Result<u8, Failure> {
    if args.det_oracle && args.zeta == 0.0 {
        return Err(Failure::usage(
            "--det-oracle requires a nonzero --zeta: every position row of Δ carries a factor ζ, \
             so the matrix is structurally singular at ζ = 0",
        ));
    }
    let axis =
        GridAxis::symmetric(args.range, args.res).map_err(|e| Failure::usage(e.to_string()))?;
    let params = QuadParams::default();

    ensure_out_dir(&args.out_dir)?;

    let s_scan = scan_grid(
        axis,
        axis,
        ScanKind::SFunction,
        args.psi,
        args.zeta,
        &params,
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    let s_grid_path = args.out_dir.join("s_grid.csv");
    write_grid_csv(&s_scan, &s_grid_path).map_err(|e| Failure::io("writing s_grid.csv", e))?;

    let (contours, contour_note) = match zero_contour(&s_scan) {
        Ok(c) => (c, None),
        Err(Error::EmptyContour) => (ContourSet::default(), Some("no sign change on the grid")),
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    let contour_path = args.out_dir.join("s_contour.csv");
    write_contour_csv(&contours, &contour_path)
        .map_err(|e| Failure::io("writing s_contour.csv", e))?;

    println!(
        "s_grid: {}x{} over [-{r}, {r}]^2 -> {}",
        args.res,
        args.res,
        s_grid_path.display(),
        r = args.range
    );
    match contour_note {
        Some(note) => println!("s_contour: {note} -> {}", contour_path.display()),
        None => println!(
            "s_contour: {} polylines, {} vertices -> {}",
            contours.polylines.len(),
            contours.vertex_count(),
            contour_path.display()
        ),
    }

    if args.det_oracle {
        let det_scan = scan_grid(
            axis,
            axis,
            ScanKind::DetOracle,
            args.psi,
            args.zeta,
            &params,
        )
        .map_err(|e| Failure::usage(e.to_string()))?;
        let det_path = args.out_dir.join("det_grid.csv");
        write_grid_csv(&det_scan, &det_path).map_err(|e| Failure::io("writing det_grid.csv", e))?;
        println!(
            "det_grid: psi={} zeta={} ({} cells outside the Euler domain) -> {}",
            args.psi,
            args.zeta,
            det_scan.unevaluated,
            det_path.display()
        );

        let report = discrepancy_report(&s_scan, &det_scan, args.s_tol, args.det_tol)
            .map_err(|e| Failure::usage(e.to_string()))?;
        let disc_path = args.out_dir.join("discrepancy.csv");
        write_discrepancy_csv(&report, &disc_path)
            .map_err(|e| Failure::io("writing discrepancy.csv", e))?;
        println!(
            "discrepancy: {} -> {}",
            report.summary(),
            disc_path.display()
        );
    }

    Ok(0)
}

fn simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let scenario =
        Scenario::from_file(&args.scenario).map_err(|e| Failure::usage(e.to_string()))?;
    scenario
        .validate()
        .map_err(|e| Failure::usage(e.to_string()))?;

    let ts = run_scenario(&scenario).map_err(|e| Failure::usage(e.to_string()))?;

    ensure_out_dir(&args.out_dir)?;
    let ts_path = args.out_dir.join("timeseries.csv");
    write_timeseries_csv(&ts, &ts_path).map_err(|e| Failure::io("writing timeseries.csv", e))?;
    let ev_path = args.out_dir.join("events.csv");
    write_events_csv(&ts, &ev_path).map_err(|e| Failure::io("writing events.csv", e))?;

    let (t, cause, detail) = ts.termination().expect("every run terminates");
    let last = ts.final_row();
    println!("termination: {} at t={:.4} s ({detail})", cause.as_str(), t);
    println!("switches: {}", ts.switch_count());
    println!(
        "final: mode={} theta={:.5} phi={:.5} z={:.5}",
        last.mode.as_str(),
        last.state.theta,
        last.state.phi,
        last.state.z
    );
    println!("rows: {} -> {}", ts.rows.len(), ts_path.display());
    println!("events: {} -> {}", ts.events.len(), ev_path.display());

    // A diverging plant is a finding, not a tool failure.
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let results = match &args.suite {
        Some(name) => {
            let r = run_suite(name, args.samples, args.seed).ok_or_else(|| {
                Failure::usage(format!(
                    "unknown suite {name:?}; available: {}",
                    SUITE_NAMES.join(", ")
                ))
            })?;
            vec![r]
        }
        None => run_all(args.samples, args.seed),
    };

    println!("samples={} seed={}", args.samples, args.seed);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        println!("all {} suite(s) passed", results.len());
        Ok(0)
    } else {
        println!("{failed} of {} suite(s) FAILED", results.len());
        Ok(3)
    }
}

fn delta(args: DeltaArgs) -> Result<u8, Failure> {
    let mode: Mode = args
        .mode
        .parse()
        .map_err(|e: Error| Failure::usage(e.to_string()))?;
    let params = QuadParams::default();

    let state = match (&args.state, args.hover) {
        (Some(_), true) => return Err(Failure::usage("give either --state or --hover, not both")),
        (None, false) => return Err(Failure::usage("give a state with --state or use --hover")),
        (Some(values), false) => {
            let arr: [f64; 14] = values
                .as_slice()
                .try_into()
                .map_err(|_| Failure::usage("--state needs exactly 14 values"))?;
            if arr.iter().any(|v| !v.is_finite()) {
                return Err(Failure::usage("--state values must be finite"));
            }
            State14::from_array(arr)
        }
        (None, true) => State14 {
            zeta: args.zeta,
            ..State14::default()
        },
    };

    let sys = mode_system(mode, &state, &params).map_err(|e| Failure::usage(e.to_string()))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&sys.to_json()).expect("plain json")
    );

    if sys.is_singular() {
        eprintln!(
            "decoupling matrix is singular or numerically near-singular (det = {:e}, cond = {:e})",
            sys.det, sys.cond
        );
        Ok(4)
    } else {
        Ok(0)
    }
}
