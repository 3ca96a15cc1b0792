//! Difference operators.
//!
//! Every partial derivative is the same 1-D matrix applied along one axis:
//! second-order central differences inside, second-order one-sided
//! stencils on the two end nodes. Because the per-axis matrices act on
//! different indices they commute exactly, so `curl . grad` and
//! `div . curl` vanish up to rounding at every node.

use super::{Axis, Degree, Grid3, ScalarField, VecField};
use crate::par;

/// Sparse 1-D derivative matrix and its transpose, indexed by node position.
struct Stencil {
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl Stencil {
    fn new(n: usize, h: f64) -> Self {
        let c = 1.0 / (2.0 * h);
        let mut rows = vec![Vec::with_capacity(3); n];
        rows[0] = vec![(0, -3.0 * c), (1, 4.0 * c), (2, -c)];
        rows[n - 1] = vec![(n - 1, 3.0 * c), (n - 2, -4.0 * c), (n - 3, c)];
        for (i, row) in rows.iter_mut().enumerate().take(n - 1).skip(1) {
            *row = vec![(i - 1, -c), (i + 1, c)];
        }
        let mut cols = vec![Vec::with_capacity(3); n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, w) in row {
                cols[j].push((i, w));
            }
        }
        Stencil { rows, cols }
    }
}

fn apply_axis<const C: usize>(
    grid: &Grid3,
    data: &[[f64; C]],
    axis: Axis,
    transpose: bool,
) -> Vec<[f64; C]> {
    assert_eq!(data.len(), grid.len());
    let st = Stencil::new(grid.n(), grid.h());
    let table = if transpose { &st.cols } else { &st.rows };
    let stride = grid.stride(axis);
    let a = axis.index();
    par::map_indices(grid.len(), |idx| {
        let pos = grid.ijk(idx)[a];
        let base = idx - pos * stride;
        let mut out = [0.0; C];
        for &(j, w) in &table[pos] {
            let v = &data[base + j * stride];
            for c in 0..C {
                out[c] += w * v[c];
            }
        }
        out
    })
}

/// Partial derivative along `axis` of every component of `data`.
pub fn partial<const C: usize>(grid: &Grid3, data: &[[f64; C]], axis: Axis) -> Vec<[f64; C]> {
    apply_axis(grid, data, axis, false)
}

/// `q[i] = sum_m t_m D[m, i]^2` for the 1-D derivative matrix `D`, with `t` the
/// 1-D trapezoidal weights (1/2 at the ends). Used for diagonal preconditioners.
pub(crate) fn weighted_column_sq(grid: &Grid3) -> Vec<f64> {
    let st = Stencil::new(grid.n(), grid.h());
    st.cols
        .iter()
        .map(|col| col.iter().map(|&(m, w)| grid.trap1(m) * w * w).sum())
        .collect()
}

/// Transpose (plain Euclidean adjoint) of [`partial`].
pub fn partial_adjoint<const C: usize>(
    grid: &Grid3,
    data: &[[f64; C]],
    axis: Axis,
) -> Vec<[f64; C]> {
    apply_axis(grid, data, axis, true)
}

fn as_nodes(values: &[f64]) -> Vec<[f64; 1]> {
    values.iter().map(|&v| [v]).collect()
}

fn from_nodes(values: Vec<[f64; 1]>) -> Vec<f64> {
    values.into_iter().map(|[v]| v).collect()
}

/// Gradient of a scalar field, as a 1-form.
pub fn grad(f: &ScalarField) -> VecField {
    let nodes = as_nodes(&f.values);
    let d: Vec<Vec<[f64; 1]>> = Axis::ALL
        .iter()
        .map(|&ax| partial(&f.grid, &nodes, ax))
        .collect();
    let values = (0..f.grid.len())
        .map(|i| [d[0][i][0], d[1][i][0], d[2][i][0]])
        .collect();
    VecField {
        grid: f.grid,
        degree: Degree::One,
        values,
    }
}

/// Adjoint of [`grad`]: `sum_a D_a^T v_a`.
pub fn grad_adjoint(v: &VecField) -> ScalarField {
    let grid = v.grid;
    let comps: Vec<Vec<[f64; 1]>> = (0..3)
        .map(|c| v.values.iter().map(|x| [x[c]]).collect())
        .collect();
    let mut out = vec![0.0; grid.len()];
    for (c, ax) in Axis::ALL.iter().enumerate() {
        let t = partial_adjoint(&grid, &comps[c], *ax);
        for (o, [x]) in out.iter_mut().zip(t) {
            *o += x;
        }
    }
    ScalarField { grid, values: out }
}

/// Curl of the vector proxy of a 1-form: the Hodge dual of its exterior derivative.
pub fn curl(a: &VecField) -> VecField {
    let g = a.grid;
    let d: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&ax| partial(&g, &a.values, ax)).collect();
    let values = par::map_indices(g.len(), |i| {
        let (dx, dy, dz) = (&d[0][i], &d[1][i], &d[2][i]);
        [dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]]
    });
    VecField {
        grid: g,
        degree: Degree::Two,
        values,
    }
}

/// Adjoint of [`curl`] with respect to the plain Euclidean node inner product.
pub fn curl_adjoint(b: &VecField) -> VecField {
    let g = b.grid;
    let d: Vec<Vec<[f64; 3]>> = Axis::ALL
        .iter()
        .map(|&ax| partial_adjoint(&g, &b.values, ax))
        .collect();
    let values = par::map_indices(g.len(), |i| {
        let (tx, ty, tz) = (&d[0][i], &d[1][i], &d[2][i]);
        [tz[1] - ty[2], tx[2] - tz[0], ty[0] - tx[1]]
    });
    VecField {
        grid: g,
        degree: Degree::One,
        values,
    }
}

/// Divergence of the vector proxy of a 2-form (its exterior derivative).
pub fn div(a: &VecField) -> ScalarField {
    let g = a.grid;
    let d: Vec<Vec<[f64; 3]>> = Axis::ALL.iter().map(|&ax| partial(&g, &a.values, ax)).collect();
    let values = par::map_indices(g.len(), |i| d[0][i][0] + d[1][i][1] + d[2][i][2]);
    ScalarField { grid: g, values }
}

/// Adjoint of [`div`].
pub fn div_adjoint(f: &ScalarField) -> VecField {
    let g = f.grid;
    let nodes = as_nodes(&f.values);
    let d: Vec<Vec<f64>> = Axis::ALL
        .iter()
        .map(|&ax| from_nodes(partial_adjoint(&g, &nodes, ax)))
        .collect();
    let values = (0..g.len()).map(|i| [d[0][i], d[1][i], d[2][i]]).collect();
    VecField {
        grid: g,
        degree: Degree::Two,
        values,
    }
}
