//! Smooth approximants `(u_eps, eta_eps)` that keep `curl eta_eps = D(u_eps)`.
//!
//! The map is lifted, the lift is mollified and projected back to `S^3`, and
//! the new gauge is `2 uhat_eps^* theta` plus the mollified closed remainder
//! `eta - 2 uhat^* theta`.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{
    curl, l2_norm, mollification_region, mollify_nodes, normalize4, norm_sq, partial, Axis,
    FieldError, Grid3, LiftField, Mollify, NodeField, Region, SphereMapField, VecField,
};
use crate::hopf::{gauge_of_lift, project_lift};
use crate::lift::{lift, LiftConfig, LiftError, LiftReport};
use crate::par;
use crate::pullback::pullback_area_form;

/// Mollified lifts shorter than this are rejected.
pub const PROJECTION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("mollified lift has norm {min_norm:.3e} < 1/2 somewhere; eps is too coarse for this map")]
    ProjectionDegenerate { min_norm: f64 },
    #[error("eps = {eps} leaves no node at distance >= 3 eps from the boundary")]
    NoInteriorNodes { eps: f64 },
    #[error("eps list must be strictly decreasing")]
    EpsNotDecreasing,
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxReport {
    pub eps: f64,
    /// `|curl eta_eps - D(u_eps)|` over nodes at distance `>= 3 eps + 2h` from the boundary.
    pub constraint_residual: f64,
    /// `|u_eps - u|_{W^{1,2}}` on the ball.
    pub map_distance: f64,
    /// `|eta_eps - eta|` on the ball.
    pub gauge_distance: f64,
    /// `|curl (eta - 2 uhat^* theta)|` over the cube: how far the remainder is from closed.
    pub remainder_curl: f64,
    /// Smallest `|mollified lift|` over mollified nodes.
    pub min_mollified_norm: f64,
    /// Nodes where the constraint residual is measured.
    pub constraint_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Approximant {
    pub u: SphereMapField,
    pub eta: VecField,
    pub uhat: LiftField,
    pub report: ApproxReport,
}

/// Nodes used for the constraint residual at width `eps`.
pub fn constraint_region(grid: &Grid3, eps: f64) -> Vec<bool> {
    let reach = 3.0 * eps + 2.0 * grid.h();
    (0..grid.len())
        .map(|i| grid.boundary_distance(i) >= reach - 1e-12)
        .collect()
}

/// `|u - v|_{W^{1,2}}` on the ball, with difference partials.
pub fn w12_distance(u: &SphereMapField, v: &SphereMapField) -> f64 {
    let g = *u.grid();
    let diff: Vec<[f64; 3]> = (0..g.len())
        .map(|i| std::array::from_fn(|c| u.values()[i][c] - v.values()[i][c]))
        .collect();
    let d: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&a| partial(&g, &diff, a)).collect();
    par::sum_indices(g.len(), |i| {
        if !g.in_ball(i) {
            return 0.0;
        }
        let e = norm_sq(&diff[i]) + d[0][i].iter().chain(&d[1][i]).chain(&d[2][i]).map(|x| x * x).sum::<f64>();
        g.weight(i) * e
    })
    .sqrt()
}

/// One approximation step from an existing lift `uhat` of `(u, eta)`.
pub fn approximate_lifted(
    u: &SphereMapField,
    eta: &VecField,
    uhat: &LiftField,
    eps: f64,
) -> Result<Approximant, ApproxError> {
    let g = *u.grid();
    let region = mollification_region(&g, eps);
    let v = mollify_nodes(&g, uhat.values(), eps)?;
    if !region.iter().any(|&r| r) {
        return Err(ApproxError::NoInteriorNodes { eps });
    }
    let min_norm = par::min_indices(g.len(), |i| {
        if region[i] {
            norm_sq(&v[i]).sqrt()
        } else {
            f64::INFINITY
        }
    });
    if min_norm < PROJECTION_THRESHOLD {
        return Err(ApproxError::ProjectionDegenerate { min_norm });
    }
    let uhat_eps = LiftField::new(g, par::map_indices(g.len(), |i| normalize4(v[i])))?;
    let u_eps = project_lift(&uhat_eps);
    let zeta = gauge_of_lift(&uhat_eps);
    let remainder = eta.add_scaled(-1.0, &gauge_of_lift(uhat));
    let remainder_curl = l2_norm(&curl(&remainder), Region::Cube);
    let eta_eps = zeta.add_scaled(1.0, &remainder.mollify(eps)?);

    let mask = constraint_region(&g, eps);
    let constraint = curl(&eta_eps).add_scaled(-1.0, &pullback_area_form(&u_eps));
    let report = ApproxReport {
        eps,
        constraint_residual: l2_norm(&constraint, Region::Mask(&mask)),
        map_distance: w12_distance(&u_eps, u),
        gauge_distance: l2_norm(&eta_eps.add_scaled(-1.0, eta), Region::Ball),
        remainder_curl,
        min_mollified_norm: min_norm,
        constraint_nodes: mask.iter().filter(|&&m| m).count(),
    };
    Ok(Approximant {
        u: u_eps,
        eta: eta_eps,
        uhat: uhat_eps,
        report,
    })
}

/// Lifts `(u, eta)` and returns the approximant at width `eps`.
pub fn approximate(
    u: &SphereMapField,
    eta: &VecField,
    eps: f64,
    cfg: &LiftConfig,
) -> Result<(Approximant, LiftReport), ApproxError> {
    check_width(u.grid(), eps)?;
    let (uhat, lift_report) = lift(u, eta, cfg)?;
    Ok((approximate_lifted(u, eta, &uhat, eps)?, lift_report))
}

fn check_width(grid: &Grid3, eps: f64) -> Result<(), FieldError> {
    if eps < grid.h() * (1.0 - 1e-12) {
        Err(FieldError::WidthTooSmall { eps, h: grid.h() })
    } else {
        Ok(())
    }
}

/// One row per width, from a single lift.
pub fn convergence_sweep(
    u: &SphereMapField,
    eta: &VecField,
    eps_list: &[f64],
    cfg: &LiftConfig,
) -> Result<Vec<ApproxReport>, ApproxError> {
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(ApproxError::EpsNotDecreasing);
    }
    for &eps in eps_list {
        check_width(u.grid(), eps)?;
    }
    let (uhat, _) = lift(u, eta, cfg)?;
    eps_list
        .iter()
        .map(|&eps| approximate_lifted(u, eta, &uhat, eps).map(|a| a.report))
        .collect()
}

#[derive(Serialize)]
struct SweepRow {
    eps: f64,
    map_distance_w12: f64,
    gauge_distance_l2: f64,
    constraint_residual: f64,
}

/// Writes the sweep table as CSV with a header row.
pub fn write_sweep_csv<W: Write>(rows: &[ApproxReport], out: W) -> Result<(), ApproxError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(SweepRow {
            eps: r.eps,
            map_distance_w12: r.map_distance,
            gauge_distance_l2: r.gauge_distance,
            constraint_residual: r.constraint_residual,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, Degree};
    use crate::hopf::S2Point;
    use crate::testmaps::{gen_constant, gen_lift_family};

    #[test]
    fn constant_data_is_fixed() {
        let g = make_grid(17, 0.0).unwrap();
        let u = gen_constant(g, &S2Point([0.6, 0.0, 0.8]));
        let eta = VecField::zeros(g, Degree::One);
        let (ap, _) = approximate(&u, &eta, 2.0 * g.h(), &LiftConfig::default()).unwrap();
        // only rounding from the kernel sums remains
        assert!(ap.report.constraint_residual < 1e-12, "{:?}", ap.report);
        assert!(ap.report.map_distance < 1e-12, "{:?}", ap.report);
        assert!(ap.report.gauge_distance < 1e-12, "{:?}", ap.report);
    }

    #[test]
    fn fast_phases_collapse_under_wide_kernels() {
        let g = make_grid(33, 0.0).unwrap();
        let fam = gen_lift_family(g, 0.7, [8.0, 0.0, 0.0], [8.0, 0.0, 0.0]).unwrap();
        let r = approximate(&fam.u, &fam.eta, 0.2, &LiftConfig::default());
        assert!(matches!(r, Err(ApproxError::ProjectionDegenerate { .. })), "{r:?}");
        let r = approximate(&fam.u, &fam.eta, 0.5, &LiftConfig::default());
        assert!(matches!(r, Err(ApproxError::NoInteriorNodes { .. })), "{r:?}");
    }

    #[test]
    fn sweep_preconditions() {
        let g = make_grid(9, 0.0).unwrap();
        let u = gen_constant(g, &S2Point([0.0, 0.0, 1.0]));
        let eta = VecField::zeros(g, Degree::One);
        let cfg = LiftConfig::default();
        assert!(matches!(
            convergence_sweep(&u, &eta, &[0.3, 0.3], &cfg),
            Err(ApproxError::EpsNotDecreasing)
        ));
        assert!(matches!(
            convergence_sweep(&u, &eta, &[g.h() / 2.0], &cfg),
            Err(ApproxError::Field(FieldError::WidthTooSmall { .. }))
        ));
        let rows = convergence_sweep(&u, &eta, &[0.3, 0.25], &cfg).unwrap();
        assert!(rows.iter().all(|r| r.map_distance == 0.0 && r.gauge_distance == 0.0));
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eps,map_distance_w12,gauge_distance_l2,constraint_residual\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
