//! Hopf lifts of sphere-valued grid maps.
//!
//! Given `u` and a gauge `eta` with `curl eta = D(u)`, a lift is built from a
//! fixed section `s` of the Hopf map and a phase `phi`:
//! `uhat = e^{i phi} s(u)` with `grad phi = (eta - 2 s(u)^* theta) / 2`.

use serde::Serialize;
use thiserror::Error;

use crate::fields::{
    curl, grad_adjoint, l2_norm, partial, weighted_column_sq, Axis, FieldError, Grid3, LiftField,
    NodeField, Region, ScalarField, SphereMapField, VecField,
};
use crate::hopf::{
    angle_between, energy_identity_defect, gauge_of_lift, hopf_raw, HopfError, S2Point, Section,
    DEFAULT_POLE_CLEARANCE,
};
use crate::par;
use crate::solver::{conjugate_gradient, CgConfig, CgStatus};

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("no candidate pole is at least {delta} rad from the range of u (best {best})")]
    ChartExhausted { best: f64, delta: f64 },
    #[error("no candidate poles supplied")]
    NoCandidates,
    #[error("eta - 2 s^*theta is not closed: relative curl {closedness:.3e} > {tol:.3e}")]
    NotClosed { closedness: f64, tol: f64 },
    #[error("phase solver diverged after {iterations} iterations")]
    SolverDiverged { iterations: usize },
    #[error("phase solver stopped at {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

/// The 12 icosahedral directions followed by the 6 coordinate directions.
pub fn default_pole_candidates() -> Vec<S2Point> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let r = (1.0 + phi * phi).sqrt();
    let (a, b) = (1.0 / r, phi / r);
    let mut out = Vec::with_capacity(18);
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            out.push(S2Point([0.0, s1 * a, s2 * b]));
            out.push(S2Point([s1 * a, s2 * b, 0.0]));
            out.push(S2Point([s2 * b, 0.0, s1 * a]));
        }
    }
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut p = [0.0; 3];
            p[axis] = s;
            out.push(S2Point(p));
        }
    }
    out
}

/// Smallest angle between `p` and any value of `u`.
pub fn min_angle_to_range(u: &SphereMapField, p: &S2Point) -> f64 {
    let v = u.values();
    par::min_indices(v.len(), |i| angle_between(&v[i], &p.0))
}

/// The candidate farthest from the range of `u` (first one on ties).
pub fn select_pole(
    u: &SphereMapField,
    candidates: &[S2Point],
    delta: f64,
) -> Result<(S2Point, f64), LiftError> {
    let mut best: Option<(S2Point, f64)> = None;
    for c in candidates {
        let d = min_angle_to_range(u, c);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((*c, d));
        }
    }
    let (pole, d) = best.ok_or(LiftError::NoCandidates)?;
    if d < delta {
        return Err(LiftError::ChartExhausted { best: d, delta });
    }
    Ok((pole, d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftConfig {
    pub candidates: Vec<S2Point>,
    /// Minimal angular distance between the pole and the range of `u`.
    pub delta: f64,
    /// Bound on `|curl alpha| / |alpha|`; `None` means `50 h^2`.
    pub closed_tol: Option<f64>,
    /// Iteration cap of the phase solve; `None` means `50 n`.
    pub max_iters: Option<usize>,
    pub rel_tol: f64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig {
            candidates: default_pole_candidates(),
            delta: DEFAULT_POLE_CLEARANCE,
            closed_tol: None,
            max_iters: None,
            rel_tol: 1e-10,
        }
    }
}

impl LiftConfig {
    pub fn closed_tol_for(&self, grid: &Grid3) -> f64 {
        self.closed_tol.unwrap_or(50.0 * grid.h() * grid.h())
    }
}

/// Accuracy of a lift, recomputed from `(u, eta, uhat)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyReport {
    /// `max |h(uhat) - u|` over all nodes.
    pub projection_error: f64,
    /// `|2 uhat^* theta - eta| / |eta|`, absolute when `|eta| < 1e-12`.
    pub gauge_error: f64,
    /// Interior max of `| |d uhat|^2 - |eta|^2/4 - |du|^2/4 |`.
    pub energy_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftReport {
    pub pole_used: S2Point,
    pub min_pole_distance: f64,
    /// `|curl alpha| / |alpha|`, absolute when `|alpha| < 1e-12`.
    pub alpha_closedness: f64,
    #[serde(flatten)]
    pub check: VerifyReport,
    /// Node at which the phase is pinned to zero.
    pub phase_anchor: usize,
    pub phase_iterations: usize,
}

fn check_grid(a: &Grid3, b: &Grid3) -> Result<(), FieldError> {
    if a != b {
        Err(FieldError::GridMismatch)
    } else {
        Ok(())
    }
}

fn relative_or_absolute(num: f64, den: f64) -> f64 {
    if den < 1e-12 {
        num
    } else {
        num / den
    }
}

/// Least-squares phase: minimizes `|grad phi - alpha|` with trapezoidal
/// weights, then shifts `phi` to vanish at `anchor`.
fn solve_phase(
    alpha: &VecField,
    anchor: usize,
    max_iters: usize,
    rel_tol: f64,
) -> Result<(ScalarField, usize), LiftError> {
    let g = alpha.grid;
    let weights: Vec<f64> = (0..g.len()).map(|i| g.weight(i)).collect();
    let weighted = |v: &[[f64; 3]]| VecField {
        grid: g,
        degree: crate::fields::Degree::One,
        values: par::map_indices(g.len(), |i| v[i].map(|c| weights[i] * c)),
    };
    let rhs = grad_adjoint(&weighted(&alpha.values)).values;
    let apply = |x: &[f64]| -> Vec<f64> {
        let nodes: Vec<[f64; 1]> = x.iter().map(|&v| [v]).collect();
        let d: Vec<Vec<[f64; 1]>> = Axis::ALL.iter().map(|&a| partial(&g, &nodes, a)).collect();
        let gradient: Vec<[f64; 3]> = (0..g.len()).map(|i| [d[0][i][0], d[1][i][0], d[2][i][0]]).collect();
        grad_adjoint(&weighted(&gradient)).values
    };
    let q = weighted_column_sq(&g);
    let h3 = g.h().powi(3);
    let inv_diag: Vec<f64> = (0..g.len())
        .map(|i| {
            let ijk = g.ijk(i);
            let d: f64 = (0..3)
                .map(|ax| {
                    let others: f64 = (0..3).filter(|&b| b != ax).map(|b| g.trap1(ijk[b])).product();
                    h3 * others * q[ijk[ax]]
                })
                .sum();
            1.0 / d
        })
        .collect();
    let cfg = CgConfig {
        max_iters,
        rel_tol,
        ..CgConfig::default()
    };
    let out = conjugate_gradient(apply, &rhs, Some(&inv_diag), &cfg);
    match out.status {
        CgStatus::Converged => {}
        CgStatus::MaxIters => {
            return Err(LiftError::NotConverged {
                iterations: out.iterations,
                residual: out.residual_rel,
            })
        }
        CgStatus::Diverged => {
            return Err(LiftError::SolverDiverged {
                iterations: out.iterations,
            })
        }
    }
    let shift = out.x[anchor];
    let values = out.x.iter().map(|v| v - shift).collect();
    Ok((ScalarField { grid: g, values }, out.iterations))
}

/// Lifts `u` through the Hopf map so that `2 uhat^* theta = eta`.
pub fn lift(
    u: &SphereMapField,
    eta: &VecField,
    cfg: &LiftConfig,
) -> Result<(LiftField, LiftReport), LiftError> {
    let g = *u.grid();
    check_grid(&g, &eta.grid)?;
    let (pole, min_pole_distance) = select_pole(u, &cfg.candidates, cfg.delta)?;
    let section = Section::new(pole, cfg.delta);
    let s = LiftField {
        grid: g,
        values: par::map_indices(g.len(), |i| section.apply_unchecked(&u.values[i]).0),
    };
    let alpha = eta.add_scaled(-1.0, &gauge_of_lift(&s)).scaled(0.5);
    let alpha_norm = l2_norm(&alpha, Region::Cube);
    let alpha_closedness = relative_or_absolute(l2_norm(&curl(&alpha), Region::Cube), alpha_norm);
    let tol = cfg.closed_tol_for(&g);
    if alpha_closedness > tol {
        return Err(LiftError::NotClosed {
            closedness: alpha_closedness,
            tol,
        });
    }
    let anchor = g.nearest_to_origin();
    let max_iters = cfg.max_iters.unwrap_or(50 * g.n());
    let (phase, phase_iterations) = solve_phase(&alpha, anchor, max_iters, cfg.rel_tol)?;
    let uhat = s.rotate_phase(&phase.values);
    let check = verify_lift(u, eta, &uhat)?;
    Ok((
        uhat,
        LiftReport {
            pole_used: pole,
            min_pole_distance,
            alpha_closedness,
            check,
            phase_anchor: anchor,
            phase_iterations,
        },
    ))
}

/// Projection, gauge and energy errors of a candidate lift.
pub fn verify_lift(
    u: &SphereMapField,
    eta: &VecField,
    uhat: &LiftField,
) -> Result<VerifyReport, LiftError> {
    let g = *u.grid();
    check_grid(&g, &eta.grid)?;
    check_grid(&g, uhat.grid())?;
    let projection_error = par::max_indices(g.len(), |i| {
        let p = hopf_raw(&uhat.values[i]);
        let q = &u.values[i];
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
    });
    let diff = gauge_of_lift(uhat).add_scaled(-1.0, eta);
    let gauge_error = relative_or_absolute(
        l2_norm(&diff, Region::Cube),
        l2_norm(eta, Region::Cube),
    );
    let defect = energy_identity_defect(uhat, u, eta)?;
    let energy_defect = par::max_indices(g.len(), |i| {
        if g.is_boundary(i) {
            0.0
        } else {
            defect.values[i].abs()
        }
    });
    Ok(VerifyReport {
        projection_error,
        gauge_error,
        energy_defect,
    })
}

/// Pointwise relative phase `arg <a, b>_C` between two lifts of the same map.
pub fn relative_phase(a: &LiftField, b: &LiftField) -> Vec<f64> {
    par::map_indices(a.values.len(), |i| {
        let (x, y) = (&a.values[i], &b.values[i]);
        // conj(z_a) z_b + conj(w_a) w_b
        let re = x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
        let im = x[0] * y[1] - x[1] * y[0] + x[2] * y[3] - x[3] * y[2];
        im.atan2(re)
    })
}

/// Standard deviation of the relative phase, measured around its circular mean.
pub fn phase_spread(a: &LiftField, b: &LiftField) -> f64 {
    let phases = relative_phase(a, b);
    let n = phases.len() as f64;
    let (s, c) = phases
        .iter()
        .fold((0.0, 0.0), |(s, c), p| (s + p.sin(), c + p.cos()));
    let mean = s.atan2(c);
    let wrap = |d: f64| (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
    (phases.iter().map(|p| wrap(p - mean).powi(2)).sum::<f64>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, Degree};
    use crate::testmaps::{gen_constant, gen_hedgehog};

    #[test]
    fn candidates_are_unit_and_distinct() {
        let c = default_pole_candidates();
        assert_eq!(c.len(), 18);
        for (i, p) in c.iter().enumerate() {
            assert!((p.0.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
            for q in &c[..i] {
                assert!(p.angle_to(q) > 0.5);
            }
        }
    }

    #[test]
    fn constant_map_lifts_to_constant() {
        let g = make_grid(9, 0.0).unwrap();
        let p = S2Point([0.0, 0.0, 1.0]);
        let u = gen_constant(g, &p);
        let eta = VecField::zeros(g, Degree::One);
        let (pole, _) = select_pole(&u, &default_pole_candidates(), 0.05).unwrap();
        assert_eq!(pole, S2Point([0.0, 0.0, -1.0]));
        let (uhat, r) = lift(&u, &eta, &LiftConfig::default()).unwrap();
        assert!(r.check.projection_error <= 1e-12);
        assert!(r.check.gauge_error <= 1e-12);
        let first = uhat.values()[0];
        assert!(uhat.values().iter().all(|v| v == &first));
    }

    #[test]
    fn hedgehog_exhausts_the_chart() {
        let g = make_grid(17, 0.0).unwrap();
        let u = gen_hedgehog(g);
        assert!(matches!(
            select_pole(&u, &default_pole_candidates(), 0.05),
            Err(LiftError::ChartExhausted { .. })
        ));
    }

    #[test]
    fn phase_spread_ignores_constant_offsets() {
        let g = make_grid(5, 0.0).unwrap();
        let a = LiftField::from_fn(g, |x| [x[0].cos(), x[0].sin(), 1.0, x[1]]);
        let b = a.rotate_phase(&vec![3.0; g.len()]);
        assert!(phase_spread(&a, &b) < 1e-12);
        let c = a.rotate_phase(&vec![-3.1; g.len()]);
        assert!(phase_spread(&a, &c) < 1e-12);
    }
}
