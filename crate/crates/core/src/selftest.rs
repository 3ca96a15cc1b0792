//! Built-in invariant suite.
//!
//! Every check runs on fixed data with fixed seeds and the report carries no
//! timings, so two runs produce byte-identical JSON whatever the thread count.

use serde::Serialize;
use thiserror::Error;

use crate::approx::approximate_lifted;
use crate::fields::{l2_norm, make_grid, FieldError, Grid3, Region, SphereMapField};
use crate::hodge::{canonical_gauge, gauge_minimality_check, gradient_orthogonality, GaugeSolveConfig};
use crate::hopf::{energy_identity_defect, frame_check_sweep, S2Point};
use crate::io::{read_h3f, write_h3f, AnyField};
use crate::lift::{lift, phase_spread, LiftConfig, LiftError};
use crate::pullback::{default_exactness_tol, exactness_defect, pointwise_identities, Verdict};
use crate::testmaps::{
    gen_constant, gen_hedgehog, gen_lift_family, gen_manufactured_gauge, gen_planar, PlanarKind,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const FRAME_SEED: u64 = 0x5eed_0003;
pub const FRAME_SAMPLES: usize = 1000;
/// Below this the flux probes and the manufactured bump are not resolved.
pub const MIN_SELFTEST_N: usize = 25;

#[derive(Debug, Error)]
pub enum SelftestError {
    #[error("selftest needs n >= {min}, got {n}")]
    TooCoarse { n: usize, min: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SelftestReport {
    pub n: usize,
    pub tolerance_scale: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SelftestReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite {
    scale: f64,
    checks: Vec<Check>,
}

impl Suite {
    /// Records `value <= tol * scale`.
    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        let tolerance = tol * self.scale;
        self.checks.push(Check {
            name: name.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    /// Records a yes/no property as value 0 (holds) or 1 (fails).
    fn holds(&mut self, name: &str, ok: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: ok,
        });
    }
}

fn roundtrips(field: AnyField) -> bool {
    let mut buf = Vec::new();
    let written = match &field {
        AnyField::Scalar(f) => write_h3f(f, &mut buf),
        AnyField::Vec(f) => write_h3f(f, &mut buf),
        AnyField::Sphere(f) => write_h3f(f, &mut buf),
        AnyField::Lift(f) => write_h3f(f, &mut buf),
    };
    written.is_ok() && read_h3f(&buf[..]).is_ok_and(|back| back == field)
}

fn interior_max(grid: &Grid3, values: &[f64]) -> f64 {
    (0..grid.len())
        .filter(|&i| !grid.is_boundary(i))
        .map(|i| values[i].abs())
        .fold(0.0, f64::max)
}

/// Runs the suite on an `n`-node grid. `tolerance_scale` multiplies every
/// tolerance (0.5 under `--strict`).
pub fn run_selftest(n: usize, tolerance_scale: f64) -> Result<SelftestReport, SelftestError> {
    if n < MIN_SELFTEST_N {
        return Err(SelftestError::TooCoarse {
            n,
            min: MIN_SELFTEST_N,
        });
    }
    let g = make_grid(n, 0.0)?;
    let h2 = g.h() * g.h();
    let mut s = Suite {
        scale: tolerance_scale,
        checks: Vec::new(),
    };

    s.at_most(
        "frame_identities",
        frame_check_sweep(FRAME_SAMPLES, FRAME_SEED).max_defect,
        1e-9,
    );

    let quarter = std::f64::consts::FRAC_PI_4;
    let fam = gen_lift_family(g, quarter, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        .expect("t0 inside the chart");
    s.at_most(
        "energy_identity_closed_form",
        (fam.oracle.duhat_sq - fam.oracle.energy_rhs).abs(),
        1e-14,
    );
    let defect = energy_identity_defect(&fam.uhat, &fam.u, &fam.eta).expect("same grid");
    s.at_most("energy_identity_discrete", interior_max(&g, &defect.values), h2);

    match lift(&fam.u, &fam.eta, &LiftConfig::default()) {
        Ok((uhat, report)) => {
            s.at_most("lift_phase_spread", phase_spread(&uhat, &fam.uhat), h2);
            s.at_most("lift_projection_error", report.check.projection_error, 1e-12);
            s.at_most("lift_gauge_error", report.check.gauge_error, h2);
        }
        Err(_) => s.holds("lift_family", false),
    }

    let generated: [(&str, SphereMapField); 5] = [
        ("constant", gen_constant(g, &S2Point([0.6, 0.0, 0.8]))),
        ("hedgehog", gen_hedgehog(g)),
        ("liftfam", fam.u.clone()),
        ("planar_gaussian_bump", gen_planar(g, PlanarKind::GaussianBump)),
        ("planar_linear_winding", gen_planar(g, PlanarKind::LinearWinding)),
    ];
    for (name, u) in &generated {
        let p = pointwise_identities(u);
        s.at_most(&format!("norm_identity_{name}"), p.norm_identity_defect, 1e-10);
        s.at_most(&format!("amgm_{name}"), p.amgm_violation, 1e-10);
    }

    let tol = default_exactness_tol(&g) * tolerance_scale;
    let hedgehog = &generated[1].1;
    s.holds(
        "hedgehog_singular",
        exactness_defect(hedgehog, tol).verdict == Verdict::Singular,
    );
    s.holds(
        "hedgehog_chart_exhausted",
        matches!(
            lift(hedgehog, &fam.eta, &LiftConfig::default()),
            Err(LiftError::ChartExhausted { .. })
        ),
    );
    s.holds(
        "planar_exact",
        exactness_defect(&generated[3].1, tol).verdict == Verdict::Exact,
    );

    let m = gen_manufactured_gauge(g);
    let mut cfg = GaugeSolveConfig::for_grid(&g);
    cfg.rel_tol *= tolerance_scale;
    match canonical_gauge(&m.g_discrete, &cfg) {
        Ok((a, _)) => {
            let err = l2_norm(&a.add_scaled(-1.0, &m.a0_discrete), Region::Cube)
                / l2_norm(&m.a0_discrete, Region::Cube);
            s.at_most("gauge_recovery", err, 1e-3);
            s.at_most("gauge_orthogonality", gradient_orthogonality(&a, 20, 1), 1e-6);
            s.at_most("gauge_minimality", gauge_minimality_check(&a, 20), 1e-6);
        }
        Err(_) => s.holds("gauge_solve", false),
    }

    let fam2 = gen_lift_family(g, quarter, [1.0, 0.0, 0.0], [0.0, 2.0, 0.0])
        .expect("t0 inside the chart");
    match approximate_lifted(&fam2.u, &fam2.eta, &fam2.uhat, 2.0 * g.h()) {
        Ok(ap) => s.at_most("approx_constraint", ap.report.constraint_residual, 5e-3),
        Err(_) => s.holds("approx", false),
    }

    s.holds("h3f_roundtrip_lift", roundtrips(AnyField::Lift(fam.uhat.clone())));
    s.holds("h3f_roundtrip_gauge", roundtrips(AnyField::Vec(fam.eta.clone())));
    s.holds("h3f_roundtrip_map", roundtrips(AnyField::Sphere(fam.u.clone())));

    let passed = s.checks.iter().all(|c| c.passed);
    Ok(SelftestReport {
        n,
        tolerance_scale,
        checks: s.checks,
        passed,
    })
}
