use hopflift::fields::{
    curl, grad, l2_norm, make_grid, Degree, Grid3, LiftField, NodeField, Region, ScalarField,
    VecField,
};
use hopflift::approx::approximate_lifted;
use hopflift::hodge::{canonical_gauge, GaugeSolveConfig};
use hopflift::hopf::{gauge_of_lift, project_lift};
use hopflift::lift::{lift, phase_spread, LiftConfig, LiftError};
use hopflift::pullback::{default_exactness_tol, exactness_defect, pullback_area_form, Verdict};
use hopflift::testmaps::{
    gen_hedgehog, gen_hedgehog_centered, gen_lift_family, gen_manufactured_gauge, gen_planar,
    PlanarKind,
};

fn interior_mask(g: &Grid3) -> Vec<bool> {
    (0..g.len()).map(|i| !g.is_boundary(i)).collect()
}

/// A lift whose projection has a nonzero pullback (the family's does not:
/// its map depends on one linear coordinate only).
fn generic_lift(n: usize) -> LiftField {
    let g = make_grid(n, 0.0).unwrap();
    LiftField::from_fn(g, |x| {
        let v = [
            1.0 + 0.5 * x[0] - 0.3 * x[2],
            0.4 * x[1] + 0.2 * (2.0 * x[2]).sin(),
            -0.5 + 0.6 * x[2] * x[0],
            0.7 * x[0] - 0.2 * x[1],
        ];
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.map(|a| a / r)
    })
}

fn family(n: usize) -> hopflift::testmaps::LiftFamily {
    let g = make_grid(n, 0.0).unwrap();
    gen_lift_family(g, 0.6, [1.0, -0.5, 0.3], [0.2, 0.8, -1.0]).unwrap()
}

#[test]
fn gauge_of_a_lift_integrates_the_pullback() {
    // curl(2 uhat^* theta) = D(h o uhat) up to O(h^2)
    let defect = |n: usize| {
        let uhat = generic_lift(n);
        let g = *uhat.grid();
        let lhs = curl(&gauge_of_lift(&uhat));
        let rhs = pullback_area_form(&project_lift(&uhat));
        let mask = interior_mask(&g);
        l2_norm(&lhs.add_scaled(-1.0, &rhs), Region::Mask(&mask)) / l2_norm(&rhs, Region::Mask(&mask))
    };
    let (coarse, fine) = (defect(17), defect(33));
    assert!(fine < 5e-3, "{fine}");
    assert!(coarse / fine > 3.5, "{coarse} -> {fine}");
}

#[test]
fn closed_form_gauge_matches_the_discrete_one() {
    let fam = family(33);
    let diff = gauge_of_lift(&fam.uhat).add_scaled(-1.0, &fam.eta);
    let rel = l2_norm(&diff, Region::Cube) / l2_norm(&fam.eta, Region::Cube);
    assert!(rel < 5e-3, "{rel}");
}

#[test]
fn lift_refuses_gauges_with_the_wrong_curl() {
    let fam = family(33);
    let g = *fam.u.grid();
    let swirl = VecField::from_fn(g, Degree::One, |x| [-x[1], x[0], 0.0]);
    let bad = fam.eta.add_scaled(1.0, &swirl);
    match lift(&fam.u, &bad, &LiftConfig::default()) {
        Err(LiftError::NotClosed { closedness, tol }) => assert!(closedness > tol),
        other => panic!("expected NotClosed, got {other:?}"),
    }
}

#[test]
fn shifting_the_gauge_by_an_exact_form_rotates_the_lift() {
    // eta + 2 grad psi lifts to e^{i psi} uhat, up to a constant phase
    let fam = family(33);
    let g = *fam.u.grid();
    let psi = ScalarField::from_fn(g, |x| 0.7 * (x[0] * x[1]) + 0.3 * (2.0 * x[2]).sin());
    let shifted = fam.eta.add_scaled(2.0, &grad(&psi));
    let cfg = LiftConfig::default();
    let (base, _) = lift(&fam.u, &fam.eta, &cfg).unwrap();
    let (moved, report) = lift(&fam.u, &shifted, &cfg).unwrap();
    assert!(report.check.projection_error < 1e-12);
    let expected = base.rotate_phase(psi.flat());
    let spread = phase_spread(&moved, &expected);
    assert!(spread < 1e-6, "{spread}");
}

#[test]
fn lifting_the_pullback_gauge_reproduces_the_map() {
    // the full chain: u -> D(u) -> eta -> uhat with h(uhat) = u
    let u = project_lift(&generic_lift(33));
    let g = *u.grid();
    let d = pullback_area_form(&u);
    let (eta, gauge) = canonical_gauge(&d, &GaugeSolveConfig::for_grid(&g)).unwrap();
    assert!(gauge.curl_residual_rel < 0.05, "{gauge:?}");
    let (uhat, report) = lift(&u, &eta, &LiftConfig::default()).unwrap();
    assert!(report.check.projection_error < 1e-12);
    assert!(report.check.gauge_error < 0.05, "{report:?}");
    let back = project_lift(&uhat);
    let err = back
        .values()
        .iter()
        .zip(u.values())
        .map(|(a, b)| (0..3).map(|c| (a[c] - b[c]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    assert!(err < 1e-12);
}

#[test]
fn gauge_solve_is_linear() {
    let g = make_grid(17, 0.0).unwrap();
    let m = gen_manufactured_gauge(g);
    let other = pullback_area_form(&family(17).u);
    let mut cfg = GaugeSolveConfig::for_grid(&g);
    cfg.rel_tol = 1e-12;
    cfg.max_iters = 2000;
    let (a1, _) = canonical_gauge(&m.g_discrete, &cfg).unwrap();
    let (a2, _) = canonical_gauge(&other, &cfg).unwrap();
    let combo = m.g_discrete.scaled(2.0).add_scaled(-0.5, &other);
    let (a3, _) = canonical_gauge(&combo, &cfg).unwrap();
    let expected = a1.scaled(2.0).add_scaled(-0.5, &a2);
    let rel = l2_norm(&a3.add_scaled(-1.0, &expected), Region::Cube) / l2_norm(&expected, Region::Cube);
    assert!(rel < 1e-8, "{rel}");
}

#[test]
fn gauge_residual_shrinks_with_resolution() {
    let residual = |n: usize| {
        let g = make_grid(n, 0.0).unwrap();
        let m = gen_manufactured_gauge(g);
        canonical_gauge(&m.g, &GaugeSolveConfig::for_grid(&g)).unwrap().1.curl_residual_rel
    };
    let r = [residual(17), residual(25), residual(33)];
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn exactness_verdicts() {
    let g = make_grid(33, 0.0).unwrap();
    let tol = default_exactness_tol(&g);
    assert_eq!(exactness_defect(&gen_hedgehog(g), tol).verdict, Verdict::Singular);
    for kind in [PlanarKind::GaussianBump, PlanarKind::LinearWinding] {
        assert_eq!(exactness_defect(&gen_planar(g, kind), tol).verdict, Verdict::Exact);
    }
    let outside = gen_hedgehog_centered(g, [3.0, 0.5, -0.2]);
    assert_eq!(exactness_defect(&outside, tol).verdict, Verdict::Exact);
    assert_eq!(exactness_defect(&family(33).u, tol).verdict, Verdict::Exact);
}

#[test]
fn hedgehog_flux_is_the_full_sphere() {
    let g = make_grid(49, 0.0).unwrap();
    let r = exactness_defect(&gen_hedgehog(g), default_exactness_tol(&g));
    let four_pi = 4.0 * std::f64::consts::PI;
    assert_eq!(r.flux_by_radius.len(), 3);
    for (radius, flux) in r.flux_by_radius {
        assert!((flux - four_pi).abs() < 0.05 * four_pi, "r = {radius}: {flux}");
    }
}

#[test]
fn dense_ranges_cannot_be_lifted_in_one_chart() {
    let g = make_grid(17, 0.0).unwrap();
    let eta = VecField::zeros(g, Degree::One);
    assert!(matches!(
        lift(&gen_hedgehog(g), &eta, &LiftConfig::default()),
        Err(LiftError::ChartExhausted { .. })
    ));
}

#[test]
fn approximants_keep_a_nonzero_constraint() {
    // the remaining residual is the O(h^2) mismatch between curl of the
    // discrete gauge and the discrete pullback
    let uhat = generic_lift(33);
    let g = *uhat.grid();
    let u = project_lift(&uhat);
    let eta = gauge_of_lift(&uhat);
    let rhs_norm = l2_norm(&pullback_area_form(&u), Region::Cube);
    let mut last = f64::INFINITY;
    for k in [4.0, 3.0, 2.0] {
        let ap = approximate_lifted(&u, &eta, &uhat, k * g.h()).unwrap();
        let r = ap.report;
        assert!(r.constraint_residual <= 5e-3 * rhs_norm, "{r:?}");
        assert!(r.map_distance < last, "{r:?}");
        last = r.map_distance;
    }
}
