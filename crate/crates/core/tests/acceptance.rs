//! Acceptance criteria, each at its stated tolerance and time budget.
//!
//! All criteria run sequentially inside one test so their wall-clock budgets
//! are not distorted by each other. Each prints one PASS/FAIL line straight to
//! stdout (bypassing the harness capture) and the test fails if any did.

use std::f64::consts::{FRAC_PI_4, PI};
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use hopflift::approx::convergence_sweep;
use hopflift::fields::{l2_norm, make_grid, Degree, NodeField, Region, VecField};
use hopflift::hodge::{
    canonical_gauge, gauge_minimality_check, gradient_orthogonality, GaugeSolveConfig,
};
use hopflift::hopf::{energy_identity_defect, frame_check_sweep, S2Point};
use hopflift::lift::{lift, phase_spread, LiftConfig, LiftError};
use hopflift::pullback::{default_exactness_tol, exactness_defect, pointwise_identities, Verdict};
use hopflift::testmaps::{
    gen_constant, gen_hedgehog, gen_hedgehog_centered, gen_lift_family, gen_manufactured_gauge,
    gen_planar, PlanarKind,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

fn run(id: u32, title: &str, budget: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let passed = out.passed && in_time;
    line(&format!(
        "criterion {id} [{}] {title}: {} ({:.1} s of {} s)",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    ));
    passed
}

fn interior_max(g: &hopflift::fields::Grid3, values: &[f64]) -> f64 {
    (0..g.len())
        .filter(|&i| !g.is_boundary(i))
        .map(|i| values[i].abs())
        .fold(0.0, f64::max)
}

fn energy_identity() -> Outcome {
    let e1 = [1.0, 0.0, 0.0];
    let e2 = [0.0, 1.0, 0.0];
    // hand oracle: eta0 = (1, 1, 0), |d uhat0|^2 = 1, |d u0|^2 = 2, 2/4 + 2/4 = 1
    let coarse_fam = gen_lift_family(make_grid(33, 0.0).unwrap(), FRAC_PI_4, e1, e2).unwrap();
    let o = coarse_fam.oracle;
    let closed_form = (o.eta[0] - 1.0).abs() < 1e-15
        && (o.eta[1] - 1.0).abs() < 1e-15
        && o.eta[2] == 0.0
        && (o.duhat_sq - 1.0).abs() < 1e-15
        && (o.du_sq - 2.0).abs() < 1e-15
        && (0.25 * 2.0 + 0.25 * 2.0 - o.duhat_sq).abs() < 1e-15;
    let defect = |n: usize| {
        let g = make_grid(n, 0.0).unwrap();
        let fam = gen_lift_family(g, FRAC_PI_4, e1, e2).unwrap();
        let d = energy_identity_defect(&fam.uhat, &fam.u, &fam.eta).unwrap();
        interior_max(&g, d.flat())
    };
    let (d33, d65) = (defect(33), defect(65));
    let ratio = d33 / d65;
    Outcome {
        passed: closed_form && d65 <= 1e-3 && ratio >= 3.5,
        detail: format!(
            "closed form {}, max defect n=33 {d33:.3e}, n=65 {d65:.3e} (<= 1e-3), ratio {ratio:.2} (>= 3.5)",
            if closed_form { "exact" } else { "WRONG" }
        ),
    }
}

fn roundtrip_lifting() -> Outcome {
    let g = make_grid(65, 0.0).unwrap();
    let fam = gen_lift_family(g, FRAC_PI_4, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
    match lift(&fam.u, &fam.eta, &LiftConfig::default()) {
        Ok((uhat, r)) => {
            let spread = phase_spread(&uhat, &fam.uhat);
            Outcome {
                passed: spread <= 1e-3
                    && r.check.projection_error <= 1e-3
                    && r.check.gauge_error <= 1e-3,
                detail: format!(
                    "phase stddev {spread:.3e}, projection {:.3e}, gauge {:.3e} (each <= 1e-3)",
                    r.check.projection_error, r.check.gauge_error
                ),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("lift failed: {e}"),
        },
    }
}

fn negative_control() -> Outcome {
    let g = make_grid(97, 0.0).unwrap();
    let u = gen_hedgehog(g);
    let r = exactness_defect(&u, default_exactness_tol(&g));
    let four_pi = 4.0 * PI;
    let radii_ok = r.flux_by_radius.len() == 3
        && r.flux_by_radius
            .iter()
            .all(|(_, f)| (f - four_pi).abs() <= 0.01 * four_pi);
    let refused = matches!(
        lift(&u, &VecField::zeros(g, Degree::One), &LiftConfig::default()),
        Err(LiftError::ChartExhausted { .. })
    );
    let fluxes: Vec<String> = r
        .flux_by_radius
        .iter()
        .map(|(rad, f)| format!("{rad}: {f:.5}"))
        .collect();
    Outcome {
        passed: radii_ok && r.verdict == Verdict::Singular && refused,
        detail: format!(
            "flux {{{}}} vs 4pi = {four_pi:.5} (1%), verdict {:?}, lift {}",
            fluxes.join(", "),
            r.verdict,
            if refused { "ChartExhausted" } else { "NOT refused" }
        ),
    }
}

fn canonical_gauge_recovery() -> Outcome {
    let g = make_grid(49, 0.0).unwrap();
    let m = gen_manufactured_gauge(g);
    match canonical_gauge(&m.g_discrete, &GaugeSolveConfig::for_grid(&g)) {
        Ok((a, report)) => {
            let err = l2_norm(&a.add_scaled(-1.0, &m.a0_discrete), Region::Cube)
                / l2_norm(&m.a0_discrete, Region::Cube);
            let ortho = gradient_orthogonality(&a, 20, 20);
            let minimal = gauge_minimality_check(&a, 20);
            Outcome {
                passed: err <= 1e-3 && ortho <= 1e-6 && minimal <= 1e-6,
                detail: format!(
                    "recovery {err:.3e} (<= 1e-3), orthogonality {ortho:.3e} (<= 1e-6), minimality {minimal:.3e} (<= 1e-6), {} CG iterations",
                    report.iterations
                ),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("gauge solve failed: {e}"),
        },
    }
}

fn frame_identities() -> Outcome {
    let r = frame_check_sweep(1000, 0x5eed_0005);
    Outcome {
        passed: r.max_defect <= 1e-9,
        detail: format!("max defect over {} points {:.3e} (<= 1e-9)", r.samples, r.max_defect),
    }
}

fn constraint_preserving_approximation() -> Outcome {
    let g = make_grid(65, 0.0).unwrap();
    let fam = gen_lift_family(g, FRAC_PI_4, [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]).unwrap();
    let h = g.h();
    match convergence_sweep(&fam.u, &fam.eta, &[8.0 * h, 4.0 * h, 2.0 * h], &LiftConfig::default()) {
        Ok(rows) => {
            let residual_ok = rows.iter().all(|r| r.constraint_residual <= 5e-3);
            let decreasing = rows.windows(2).all(|w| {
                w[1].map_distance < w[0].map_distance && w[1].gauge_distance < w[0].gauge_distance
            });
            let cols: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "eps {:.4}: w12 {:.3e}, l2 {:.3e}, residual {:.1e}",
                        r.eps, r.map_distance, r.gauge_distance, r.constraint_residual
                    )
                })
                .collect();
            Outcome {
                passed: residual_ok && decreasing,
                detail: format!(
                    "[{}], distances {}",
                    cols.join("; "),
                    if decreasing { "strictly decreasing" } else { "NOT decreasing" }
                ),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("sweep failed: {e}"),
        },
    }
}

fn pointwise_identity_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut maps = 0;
    for n in [17, 33] {
        let g = make_grid(n, 0.0).unwrap();
        let mut fields = vec![
            gen_constant(g, &S2Point([0.0, 0.0, 1.0])),
            gen_constant(g, &S2Point([0.6, -0.8, 0.0])),
            gen_hedgehog(g),
            gen_hedgehog_centered(g, [2.0, -1.5, 0.3]),
            gen_planar(g, PlanarKind::GaussianBump),
            gen_planar(g, PlanarKind::LinearWinding),
        ];
        for (t0, a, b) in [
            (FRAC_PI_4, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            (0.3, [2.0, -1.0, 0.5], [0.0, 0.5, -2.0]),
            (1.2, [0.0, 0.0, 3.0], [1.0, 1.0, 1.0]),
        ] {
            fields.push(gen_lift_family(g, t0, a, b).unwrap().u);
        }
        for u in &fields {
            let r = pointwise_identities(u);
            worst = worst.max(r.norm_identity_defect).max(r.amgm_violation);
            maps += 1;
        }
    }
    Outcome {
        passed: worst <= 1e-10,
        detail: format!("worst violation over {maps} maps {worst:.3e} (<= 1e-10)"),
    }
}

fn selftest_json(threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hopflift"))
        .args(["selftest", "--n", "33"])
        .env("HOPFLIFT_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: Result<Vec<Vec<u8>>, String> = ["1", "4", "1"].iter().map(|t| selftest_json(t)).collect();
    match runs {
        Ok(runs) => {
            let identical = runs.windows(2).all(|w| w[0] == w[1]);
            Outcome {
                passed: identical && !runs[0].is_empty(),
                detail: format!(
                    "selftest JSON with HOPFLIFT_THREADS = 1, 4, 1: {} ({} bytes)",
                    if identical { "bit-identical" } else { "DIFFERENT" },
                    runs[0].len()
                ),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("selftest failed: {e}"),
        },
    }
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "energy identity", secs(10), energy_identity),
        run(2, "roundtrip lifting", secs(60), roundtrip_lifting),
        run(3, "negative control", secs(30), negative_control),
        run(4, "canonical gauge", secs(120), canonical_gauge_recovery),
        run(5, "pointwise exact-layer identities", secs(1), frame_identities),
        run(6, "constraint-preserving approximation", secs(300), constraint_preserving_approximation),
        run(7, "AM-GM and norm identities", secs(10), pointwise_identity_suite),
        run(8, "determinism", secs(120), determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    line(&format!("acceptance: {passed} of {} criteria passed", results.len()));
    assert_eq!(passed, results.len(), "some acceptance criteria failed");
}
