//! The `hopflift` command line.
//!
//! Every subcommand reads and writes H3F1 files, prints a one-line summary on
//! stderr and emits a JSON report, either to `--report` or to stdout. Exit
//! codes depend only on the error class: 0 success, 2 failed precondition or
//! non-exact verdict, 3 solver failure, 64 malformed invocation.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::approx::{approximate, convergence_sweep, write_sweep_csv, ApproxError};
use crate::fields::{make_grid, Degree, FieldError, Grid3, NodeField, SphereMapField, VecField};
use crate::hodge::{canonical_gauge, GaugeSolveConfig, HodgeError};
use crate::hopf::{frame_check_sweep, gauge_of_lift, project_lift, HopfError, S2Point};
use crate::io::{export_vtk, load_lift, load_sphere_map, load_vec, save_h3f, IoError};
use crate::lift::{lift, verify_lift, LiftConfig, LiftError};
use crate::par;
use crate::pullback::{default_exactness_tol, exactness_defect, pullback_area_form, Verdict};
use crate::selftest::{run_selftest, SelftestError, FRAME_SEED, SCHEMA_VERSION};
use crate::testmaps::{
    gen_constant, gen_hedgehog, gen_lift_family, gen_planar, PlanarKind, TestMapError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HOPFLIFT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hopflift", version, about = "Hopf lifts of sphere-valued grid maps")]
struct Cli {
    /// Halve every tolerance.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an analytic test map (and its oracle values).
    Gen(GenArgs),
    /// Pulled-back area form D(u).
    Pullback {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exactness verdict for D(u); exit 2 unless exact.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write div D(u) as VTK.
        #[arg(long)]
        vtk: Option<PathBuf>,
        /// Exact-verdict tolerance (default 10 h^2).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Canonical gauge of a 2-form.
    Gauge {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Relative CG tolerance (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration cap (default 20 n).
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        div_penalty: Option<f64>,
        /// Default 10 / h.
        #[arg(long)]
        boundary_penalty: Option<f64>,
        /// Plain CG without the diagonal preconditioner.
        #[arg(long)]
        no_jacobi: bool,
    },
    /// Lift (u, eta) through the Hopf map.
    Lift {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Projection, gauge and energy errors of a candidate lift.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        uhat: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Bound on projection and gauge error; exit 2 when exceeded.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Hopf projection of a lift, node by node.
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// The gauge 2 uhat^* theta of a lift.
    GaugeOfLift {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Smooth approximant at one mollifier width.
    Approx {
        #[command(flatten)]
        pair: PairArgs,
        /// Width, absolute or in grid steps (e.g. `4h`).
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out_prefix: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Approximation errors over decreasing widths.
    Sweep {
        #[command(flatten)]
        pair: PairArgs,
        /// Comma-separated widths, absolute or in grid steps.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Exact-layer identities at random chart points.
    FrameCheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = FRAME_SEED)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Built-in invariant suite.
    Selftest {
        #[arg(long, default_value_t = 33)]
        n: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Constant,
    Hedgehog,
    Liftfam,
    Planar,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    map: MapKind,
    #[arg(long, default_value_t = 33)]
    n: usize,
    /// Latitude of the lift family.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    t0: f64,
    /// Phase wave vector of the first lift component.
    #[arg(long, value_parser = parse_vec3, default_value = "1,0,0", allow_hyphen_values = true)]
    a: [f64; 3],
    /// Phase wave vector of the second lift component.
    #[arg(long, value_parser = parse_vec3, default_value = "0,1,0", allow_hyphen_values = true)]
    b: [f64; 3],
    /// Value of the constant map (normalized).
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1", allow_hyphen_values = true)]
    point: [f64; 3],
    /// gaussian-bump or linear-winding.
    #[arg(long, default_value = "gaussian-bump")]
    planar: String,
    #[arg(long)]
    out_prefix: String,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long)]
    u: PathBuf,
    #[arg(long)]
    eta: PathBuf,
}

#[derive(Debug, Args)]
struct LiftArgs {
    /// Minimal pole distance from the range of u, in radians.
    #[arg(long)]
    delta: Option<f64>,
    /// Closedness bound on eta - 2 s^* theta (default 50 h^2).
    #[arg(long)]
    closed_tol: Option<f64>,
    /// Relative tolerance of the phase solve (default 1e-10).
    #[arg(long)]
    phase_tol: Option<f64>,
    /// Iteration cap of the phase solve (default 50 n).
    #[arg(long)]
    phase_iters: Option<usize>,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|_| format!("expected three comma-separated numbers, got '{s}'"))
}

/// Parses `0.1` or `4h` (a multiple of the grid step).
fn parse_width(s: &str, h: f64) -> Result<f64, CliError> {
    let s = s.trim();
    let value = match s.strip_suffix('h') {
        Some(k) => k.parse::<f64>().map(|k| k * h),
        None => s.parse::<f64>(),
    };
    value.map_err(|_| CliError::Usage(format!("invalid width '{s}'")))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Precondition(String),
    Solver(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }

    fn precondition(e: impl Display) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Precondition(m) | CliError::Solver(m) => f.write_str(m),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::precondition(e)
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::precondition(e)
    }
}

impl From<HopfError> for CliError {
    fn from(e: HopfError) -> Self {
        CliError::precondition(e)
    }
}

impl From<TestMapError> for CliError {
    fn from(e: TestMapError) -> Self {
        CliError::precondition(e)
    }
}

impl From<SelftestError> for CliError {
    fn from(e: SelftestError) -> Self {
        match e {
            SelftestError::TooCoarse { .. } => CliError::Usage(e.to_string()),
            SelftestError::Field(f) => f.into(),
        }
    }
}

impl From<HodgeError> for CliError {
    fn from(e: HodgeError) -> Self {
        match e {
            HodgeError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            HodgeError::SolverDiverged { .. } | HodgeError::NotConverged(_) => {
                CliError::Solver(e.to_string())
            }
            HodgeError::WrongDegree(_) | HodgeError::Field(_) => CliError::precondition(e),
        }
    }
}

impl From<LiftError> for CliError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::SolverDiverged { .. } | LiftError::NotConverged { .. } => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::precondition(e),
        }
    }
}

impl From<ApproxError> for CliError {
    fn from(e: ApproxError) -> Self {
        match e {
            ApproxError::Lift(l) => l.into(),
            other => CliError::precondition(other),
        }
    }
}

/// What a subcommand produced: a summary line, a JSON body and an exit code.
struct Outcome {
    summary: String,
    report: Option<(Option<PathBuf>, serde_json::Value)>,
    code: i32,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Outcome {
            summary,
            report: None,
            code: EXIT_OK,
        }
    }

    fn with_report(mut self, path: Option<PathBuf>, body: impl Serialize) -> Result<Self, CliError> {
        let body = serde_json::to_value(body).map_err(CliError::precondition)?;
        self.report = Some((path, body));
        Ok(self)
    }
}

fn envelope(command: &str, body: serde_json::Value) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "report": body,
    });
    serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if path.as_os_str().is_empty() {
        return Err(IoError::EmptyPath.into());
    }
    std::fs::write(path, text).map_err(|source| {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Pullback { .. } => "pullback",
        Command::Check { .. } => "check",
        Command::Gauge { .. } => "gauge",
        Command::Lift { .. } => "lift",
        Command::Verify { .. } => "verify",
        Command::Project { .. } => "project",
        Command::GaugeOfLift { .. } => "gauge-of-lift",
        Command::Approx { .. } => "approx",
        Command::Sweep { .. } => "sweep",
        Command::FrameCheck { .. } => "frame-check",
        Command::Selftest { .. } => "selftest",
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match thread_count() {
        Ok(threads) => par::install(threads, || execute(&cli)),
        Err(e) => Err(e),
    };
    match result {
        Ok(out) => {
            eprintln!("{}", out.summary);
            if let Some((path, body)) = out.report {
                let text = envelope(command_name(&cli.command), body);
                match path {
                    Some(p) => {
                        if let Err(e) = write_text(&p, &text) {
                            eprintln!("error: {e}");
                            return e.code();
                        }
                    }
                    None => println!("{text}"),
                }
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

impl LiftArgs {
    fn config(&self, scale: f64, grid: &Grid3) -> LiftConfig {
        let mut cfg = LiftConfig::default();
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        cfg.closed_tol = Some(self.closed_tol.unwrap_or_else(|| cfg.closed_tol_for(grid)) * scale);
        cfg.max_iters = self.phase_iters;
        cfg.rel_tol = self.phase_tol.unwrap_or(cfg.rel_tol) * scale;
        cfg
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let scale = if cli.strict { 0.5 } else { 1.0 };
    match &cli.command {
        Command::Gen(args) => generate(args),
        Command::Pullback { input, out } => {
            let u = load_sphere_map(input)?;
            save_h3f(&pullback_area_form(&u), out)?;
            Ok(Outcome::ok(format!("pullback: wrote {}", out.display())))
        }
        Command::Check {
            input,
            report,
            vtk,
            tol,
        } => {
            let u = load_sphere_map(input)?;
            let tol = tol.unwrap_or_else(|| default_exactness_tol(u.grid())) * scale;
            let r = exactness_defect(&u, tol);
            if let Some(path) = vtk {
                export_vtk(&r.div_defect, "div_pullback", path)?;
            }
            let verdict = serde_json::to_value(r.verdict).map_err(CliError::precondition)?;
            let code = if r.verdict == Verdict::Exact {
                EXIT_OK
            } else {
                EXIT_PRECONDITION
            };
            let fluxes: Vec<String> = r.flux_by_radius.iter().map(|(_, f)| format!("{f:.6}")).collect();
            Outcome {
                summary: format!(
                    "check: verdict {} (max interior div {:.3e}, flux [{}])",
                    verdict.as_str().unwrap_or("?"),
                    r.max_interior_div,
                    fluxes.join(", ")
                ),
                report: None,
                code,
            }
            .with_report(report.clone(), &r)
        }
        Command::Gauge {
            input,
            out,
            report,
            tol,
            iters,
            div_penalty,
            boundary_penalty,
            no_jacobi,
        } => {
            let g = load_vec(input, Degree::Two)?;
            let mut cfg = GaugeSolveConfig::for_grid(g.grid());
            cfg.rel_tol = tol.unwrap_or(cfg.rel_tol) * scale;
            cfg.max_iters = iters.unwrap_or(cfg.max_iters);
            cfg.div_penalty = div_penalty.unwrap_or(cfg.div_penalty);
            cfg.boundary_penalty = boundary_penalty.unwrap_or(cfg.boundary_penalty);
            cfg.jacobi = !no_jacobi;
            let (a, r) = canonical_gauge(&g, &cfg)?;
            save_h3f(&a, out)?;
            Outcome::ok(format!(
                "gauge: {} iterations, curl residual {:.3e}, wrote {}",
                r.iterations,
                r.curl_residual_rel,
                out.display()
            ))
            .with_report(report.clone(), r)
        }
        Command::Lift {
            pair,
            out,
            report,
            lift: largs,
        } => {
            let (u, eta) = load_pair(pair)?;
            let (uhat, r) = lift(&u, &eta, &largs.config(scale, u.grid()))?;
            save_h3f(&uhat, out)?;
            Outcome::ok(format!(
                "lift: pole {:?}, gauge error {:.3e}, wrote {}",
                r.pole_used.0,
                r.check.gauge_error,
                out.display()
            ))
            .with_report(report.clone(), r)
        }
        Command::Verify {
            pair,
            uhat,
            report,
            tol,
        } => {
            let (u, eta) = load_pair(pair)?;
            let uhat = load_lift(uhat)?;
            let r = verify_lift(&u, &eta, &uhat)?;
            let tol = tol * scale;
            let ok = r.projection_error <= tol && r.gauge_error <= tol;
            Outcome {
                summary: format!(
                    "verify: projection {:.3e}, gauge {:.3e}, energy {:.3e} ({})",
                    r.projection_error,
                    r.gauge_error,
                    r.energy_defect,
                    if ok { "ok" } else { "exceeds tolerance" }
                ),
                report: None,
                code: if ok { EXIT_OK } else { EXIT_PRECONDITION },
            }
            .with_report(report.clone(), r)
        }
        Command::Project { input, out } => {
            let uhat = load_lift(input)?;
            save_h3f(&project_lift(&uhat), out)?;
            Ok(Outcome::ok(format!("project: wrote {}", out.display())))
        }
        Command::GaugeOfLift { input, out } => {
            let uhat = load_lift(input)?;
            save_h3f(&gauge_of_lift(&uhat), out)?;
            Ok(Outcome::ok(format!("gauge-of-lift: wrote {}", out.display())))
        }
        Command::Approx {
            pair,
            eps,
            out_prefix,
            report,
            lift: largs,
        } => {
            let (u, eta) = load_pair(pair)?;
            let eps = parse_width(eps, u.grid().h())?;
            let (ap, lr) = approximate(&u, &eta, eps, &largs.config(scale, u.grid()))?;
            save_h3f(&ap.u, &prefixed(out_prefix, "u.h3f"))?;
            save_h3f(&ap.eta, &prefixed(out_prefix, "eta.h3f"))?;
            save_h3f(&ap.uhat, &prefixed(out_prefix, "uhat.h3f"))?;
            let body = json!({ "approximation": ap.report, "lift": lr });
            Outcome::ok(format!(
                "approx: eps {:.4}, constraint residual {:.3e}, wrote {out_prefix}{{u,eta,uhat}}.h3f",
                eps, ap.report.constraint_residual
            ))
            .with_report(report.clone(), body)
        }
        Command::Sweep {
            pair,
            eps,
            csv,
            report,
            lift: largs,
        } => {
            let (u, eta) = load_pair(pair)?;
            let h = u.grid().h();
            let widths: Vec<f64> = eps.iter().map(|e| parse_width(e, h)).collect::<Result<_, _>>()?;
            if widths.is_empty() {
                return Err(CliError::Usage("--eps needs at least one width".into()));
            }
            let rows = convergence_sweep(&u, &eta, &widths, &largs.config(scale, u.grid()))?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            write_text(csv, &String::from_utf8(buf).expect("CSV output is UTF-8"))?;
            Outcome::ok(format!("sweep: {} widths, wrote {}", rows.len(), csv.display()))
                .with_report(report.clone(), rows)
        }
        Command::FrameCheck {
            samples,
            seed,
            report,
            tol,
        } => {
            let r = frame_check_sweep(*samples, *seed);
            let tol = tol * scale;
            let ok = r.max_defect <= tol;
            Outcome {
                summary: format!(
                    "frame-check: {} samples, max defect {:.3e} ({})",
                    r.samples,
                    r.max_defect,
                    if ok { "ok" } else { "exceeds tolerance" }
                ),
                report: None,
                code: if ok { EXIT_OK } else { EXIT_PRECONDITION },
            }
            .with_report(report.clone(), r)
        }
        Command::Selftest { n, report } => {
            let r = run_selftest(*n, scale)?;
            let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
            let summary = if failed.is_empty() {
                format!("selftest: {} checks passed at n = {n}", r.checks.len())
            } else {
                format!("selftest: {} of {} checks failed: {}", failed.len(), r.checks.len(), failed.join(", "))
            };
            Outcome {
                summary,
                report: None,
                code: if r.passed { EXIT_OK } else { EXIT_PRECONDITION },
            }
            .with_report(report.clone(), r)
        }
    }
}

fn load_pair(pair: &PairArgs) -> Result<(SphereMapField, VecField), CliError> {
    let u = load_sphere_map(&pair.u)?;
    let eta = load_vec(&pair.eta, Degree::One)?;
    if u.grid().n() != eta.grid().n() {
        return Err(FieldError::GridMismatch.into());
    }
    Ok((u, eta))
}

fn prefixed(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

fn generate(args: &GenArgs) -> Result<Outcome, CliError> {
    let g = make_grid(args.n, 0.0)?;
    let p = &args.out_prefix;
    let oracle = match args.map {
        MapKind::Constant => {
            let point = S2Point::new(args.point)?;
            save_h3f(&gen_constant(g, &point), &prefixed(p, "u.h3f"))?;
            save_h3f(&VecField::zeros(g, Degree::One), &prefixed(p, "eta.h3f"))?;
            json!({ "map": "constant", "n": args.n, "h": g.h(), "point": point, "eta": [0.0, 0.0, 0.0] })
        }
        MapKind::Hedgehog => {
            save_h3f(&gen_hedgehog(g), &prefixed(p, "u.h3f"))?;
            json!({
                "map": "hedgehog",
                "n": args.n,
                "h": g.h(),
                "flux": 4.0 * std::f64::consts::PI,
                "verdict": Verdict::Singular,
            })
        }
        MapKind::Liftfam => {
            let fam = gen_lift_family(g, args.t0, args.a, args.b)?;
            save_h3f(&fam.u, &prefixed(p, "u.h3f"))?;
            save_h3f(&fam.uhat, &prefixed(p, "uhat.h3f"))?;
            save_h3f(&fam.eta, &prefixed(p, "eta.h3f"))?;
            json!({ "map": "liftfam", "n": args.n, "h": g.h(), "family": fam.oracle })
        }
        MapKind::Planar => {
            let kind: PlanarKind = args.planar.parse()?;
            save_h3f(&gen_planar(g, kind), &prefixed(p, "u.h3f"))?;
            json!({
                "map": "planar",
                "n": args.n,
                "h": g.h(),
                "planar": kind,
                "far_field": [0.0, 0.0, 1.0],
                "verdict": Verdict::Exact,
            })
        }
    };
    write_text(&prefixed(p, "oracle.json"), &envelope("gen", oracle))?;
    Ok(Outcome::ok(format!("gen: wrote {p}u.h3f and {p}oracle.json")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_accept_grid_steps() {
        assert_eq!(parse_width("0.25", 0.1).unwrap(), 0.25);
        assert!((parse_width("4h", 0.125).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(parse_width("4x", 0.1), Err(CliError::Usage(_))));
    }

    #[test]
    fn vectors_parse() {
        assert_eq!(parse_vec3("1,-2, 0.5").unwrap(), [1.0, -2.0, 0.5]);
        assert!(parse_vec3("1,2").is_err());
    }

    #[test]
    fn usage_errors_and_help() {
        assert_eq!(run(["hopflift"]), EXIT_USAGE);
        assert_eq!(run(["hopflift", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["hopflift", "gen", "--map", "nope", "--out-prefix", "x"]), EXIT_USAGE);
        assert_eq!(run(["hopflift", "--help"]), EXIT_OK);
    }

    #[test]
    fn error_classes_map_to_codes() {
        let c: CliError = LiftError::ChartExhausted { best: 0.0, delta: 0.05 }.into();
        assert_eq!(c.code(), EXIT_PRECONDITION);
        let c: CliError = LiftError::NotConverged { iterations: 1, residual: 1.0 }.into();
        assert_eq!(c.code(), EXIT_SOLVER);
        let c: CliError = ApproxError::Lift(LiftError::SolverDiverged { iterations: 3 }).into();
        assert_eq!(c.code(), EXIT_SOLVER);
        let c: CliError = HodgeError::WrongDegree(Degree::One).into();
        assert_eq!(c.code(), EXIT_PRECONDITION);
        let c: CliError = IoError::EmptyPath.into();
        assert_eq!(c.code(), EXIT_PRECONDITION);
    }
}
