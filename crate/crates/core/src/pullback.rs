//! The pulled-back area form `u^* omega` of a sphere-valued map, through its
//! Hodge-dual vector field
//! `D(u) = (u.(d2 u x d3 u), u.(d3 u x d1 u), u.(d1 u x d2 u))`,
//! and the diagnostics built on it.

use serde::Serialize;
use thiserror::Error;

use crate::fields::{
    cross3, div, dot3, norm_sq, partial, Axis, Degree, Grid3, ScalarField, SphereMapField,
    VecField,
};
use crate::par;

/// Quadrature points on each probe sphere.
pub const FLUX_POINTS: usize = 801;
/// Radii probed by [`exactness_defect`].
pub const FLUX_RADII: [f64; 3] = [0.25, 0.5, 0.75];
/// Relative spread allowed between probe fluxes for a `Singular` verdict.
pub const SINGULAR_FLUX_SPREAD: f64 = 0.25;

#[derive(Debug, Error)]
pub enum PullbackError {
    #[error("probe radius {radius} outside (0, {max})")]
    RadiusOutOfRange { radius: f64, max: f64 },
}

/// `D(u)` from difference partials, as a 2-form proxy.
pub fn pullback_area_form(u: &SphereMapField) -> VecField {
    let g = u.grid;
    let d: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&a| partial(&g, &u.values, a)).collect();
    let values = par::map_indices(g.len(), |i| {
        let v = &u.values[i];
        let (d1, d2, d3) = (&d[0][i], &d[1][i], &d[2][i]);
        [
            dot3(v, &cross3(d2, d3)),
            dot3(v, &cross3(d3, d1)),
            dot3(v, &cross3(d1, d2)),
        ]
    });
    VecField {
        grid: g,
        degree: Degree::Two,
        values,
    }
}

/// Nodes used for pointwise statistics: off the cube boundary and more than
/// `2h` from the origin.
pub fn statistics_mask(grid: &Grid3) -> Vec<bool> {
    let r = 2.0 * grid.h();
    (0..grid.len())
        .map(|i| !grid.is_boundary(i) && norm_sq(&grid.point(i)) > r * r * (1.0 + 1e-12))
        .collect()
}

/// Worst violations of the two pointwise identities over interior nodes.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PointwiseReport {
    /// `max | |D(u)|^2 - sum_{j<l} |P d_j u x P d_l u|^2 |`, with `P` the
    /// projection onto the tangent plane at `u`.
    pub norm_identity_defect: f64,
    /// `max( 0, |D(u)| - |du|^2 / 2 )`.
    pub amgm_violation: f64,
    pub nodes: usize,
}

pub fn pointwise_identities(u: &SphereMapField) -> PointwiseReport {
    let g = u.grid;
    let d: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&a| partial(&g, &u.values, a)).collect();
    let interior: Vec<usize> = (0..g.len()).filter(|&i| !g.is_boundary(i)).collect();
    let per_node = par::map_indices(interior.len(), |k| {
        let i = interior[k];
        let v = &u.values[i];
        let raw = [d[0][i], d[1][i], d[2][i]];
        let tangent = raw.map(|a| {
            let c = dot3(&a, v);
            [a[0] - c * v[0], a[1] - c * v[1], a[2] - c * v[2]]
        });
        let dv = [
            dot3(v, &cross3(&raw[1], &raw[2])),
            dot3(v, &cross3(&raw[2], &raw[0])),
            dot3(v, &cross3(&raw[0], &raw[1])),
        ];
        let d_sq = norm_sq(&dv);
        let cross_sq = norm_sq(&cross3(&tangent[0], &tangent[1]))
            + norm_sq(&cross3(&tangent[0], &tangent[2]))
            + norm_sq(&cross3(&tangent[1], &tangent[2]));
        let energy: f64 = raw.iter().map(norm_sq).sum();
        ((d_sq - cross_sq).abs(), (d_sq.sqrt() - 0.5 * energy).max(0.0))
    });
    PointwiseReport {
        norm_identity_defect: per_node.iter().map(|p| p.0).fold(0.0, f64::max),
        amgm_violation: per_node.iter().map(|p| p.1).fold(0.0, f64::max),
        nodes: interior.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Exact,
    Singular,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactnessReport {
    #[serde(skip)]
    pub div_defect: ScalarField,
    pub max_interior_div: f64,
    pub h: f64,
    pub tolerance: f64,
    /// `(radius, flux)` for each probe radius that fits inside the grid.
    pub flux_by_radius: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

/// Default tolerance for the exact verdict, `10 h^2`.
pub fn default_exactness_tol(grid: &Grid3) -> f64 {
    10.0 * grid.h() * grid.h()
}

/// Divergence of `D(u)` plus flux probes around the origin.
///
/// A Dirac mass in `div D(u)` is invisible pointwise but shows up as the same
/// nonzero flux through every probe sphere, so the verdict is:
/// `Exact` when `max |div D| * h <= tol` and every flux is within `tol`;
/// `Singular` when every flux exceeds `tol` and the fluxes agree to within
/// [`SINGULAR_FLUX_SPREAD`]; `Inconclusive` otherwise.
pub fn exactness_defect(u: &SphereMapField, tol: f64) -> ExactnessReport {
    let g = u.grid;
    let form = pullback_area_form(u);
    let div_defect = div(&form);
    let mask = statistics_mask(&g);
    let max_interior_div = par::max_indices(g.len(), |i| {
        if mask[i] {
            div_defect.values[i].abs()
        } else {
            0.0
        }
    });
    let flux_by_radius: Vec<(f64, f64)> = FLUX_RADII
        .iter()
        .filter_map(|&r| sphere_flux(&form, r).ok().map(|f| (r, f)))
        .collect();

    let fluxes_small = flux_by_radius.iter().all(|(_, f)| f.abs() <= tol);
    let verdict = if max_interior_div * g.h() <= tol && fluxes_small {
        Verdict::Exact
    } else if !flux_by_radius.is_empty() && flux_by_radius.iter().all(|(_, f)| f.abs() > tol) {
        let mean = flux_by_radius.iter().map(|p| p.1).sum::<f64>() / flux_by_radius.len() as f64;
        let spread = flux_by_radius
            .iter()
            .map(|p| (p.1 - mean).abs())
            .fold(0.0, f64::max);
        if spread <= SINGULAR_FLUX_SPREAD * mean.abs() {
            Verdict::Singular
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Inconclusive
    };

    ExactnessReport {
        div_defect,
        max_interior_div,
        h: g.h(),
        tolerance: tol,
        flux_by_radius,
        verdict,
    }
}

/// Trilinear interpolation of node vectors at an arbitrary point of the cube.
pub fn interpolate(field: &VecField, x: [f64; 3]) -> [f64; 3] {
    let g = &field.grid;
    let n = g.n();
    let mut base = [0usize; 3];
    let mut frac = [0.0; 3];
    for a in 0..3 {
        let s = (x[a] + 1.0) / g.h();
        let i0 = (s.floor().max(0.0) as usize).min(n - 2);
        base[a] = i0;
        frac[a] = s - i0 as f64;
    }
    let mut out = [0.0; 3];
    for corner in 0..8 {
        let off = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
        let w: f64 = (0..3)
            .map(|a| if off[a] == 1 { frac[a] } else { 1.0 - frac[a] })
            .product();
        let v = &field.values[g.index(base[0] + off[0], base[1] + off[1], base[2] + off[2])];
        for c in 0..3 {
            out[c] += w * v[c];
        }
    }
    out
}

/// Fibonacci-lattice directions on the unit sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Outward flux of a 2-form proxy through the sphere `|x| = radius`.
pub fn sphere_flux(form: &VecField, radius: f64) -> Result<f64, PullbackError> {
    let max = 1.0 - 3.0 * form.grid.h();
    if !(radius > 0.0 && radius < max) {
        return Err(PullbackError::RadiusOutOfRange { radius, max });
    }
    let dirs = fibonacci_sphere(FLUX_POINTS);
    let area = 4.0 * std::f64::consts::PI * radius * radius / FLUX_POINTS as f64;
    let sum: f64 = dirs
        .iter()
        .map(|d| dot3(&interpolate(form, d.map(|c| c * radius)), d))
        .sum();
    Ok(sum * area)
}
