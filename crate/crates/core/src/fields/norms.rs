use super::{FieldError, Grid3, NodeField};
use crate::par;

/// Node subset over which a quadrature is taken.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    /// Whole cube with trapezoidal weights.
    Cube,
    /// Nodes inside the inscribed ball.
    Ball,
    /// Nodes off the cube boundary.
    Interior,
    /// Caller-supplied node mask.
    Mask(&'a [bool]),
}

impl Region<'_> {
    pub(crate) fn weight(&self, grid: &Grid3, idx: usize) -> f64 {
        let keep = match self {
            Region::Cube => true,
            Region::Ball => grid.in_ball(idx),
            Region::Interior => !grid.is_boundary(idx),
            Region::Mask(m) => m[idx],
        };
        if keep {
            grid.weight(idx)
        } else {
            0.0
        }
    }
}

fn check_pair<A: NodeField, B: NodeField>(a: &A, b: &B) -> Result<(), FieldError> {
    if a.grid() != b.grid() {
        return Err(FieldError::GridMismatch);
    }
    if a.kind() != b.kind() {
        return Err(FieldError::KindMismatch(a.kind(), b.kind()));
    }
    Ok(())
}

/// Weighted inner product `sum_i w_i <a_i, b_i>`.
pub fn l2_inner<A: NodeField, B: NodeField>(
    a: &A,
    b: &B,
    region: Region<'_>,
) -> Result<f64, FieldError> {
    check_pair(a, b)?;
    let grid = *a.grid();
    let c = a.ncomp();
    let (fa, fb) = (a.flat(), b.flat());
    Ok(par::sum_indices(grid.len(), |i| {
        let w = region.weight(&grid, i);
        if w == 0.0 {
            return 0.0;
        }
        let s: f64 = (0..c).map(|k| fa[i * c + k] * fb[i * c + k]).sum();
        w * s
    }))
}

pub fn l2_norm<A: NodeField>(a: &A, region: Region<'_>) -> f64 {
    let grid = *a.grid();
    let c = a.ncomp();
    let fa = a.flat();
    par::sum_indices(grid.len(), |i| {
        let w = region.weight(&grid, i);
        if w == 0.0 {
            return 0.0;
        }
        w * (0..c).map(|k| fa[i * c + k] * fa[i * c + k]).sum::<f64>()
    })
    .sqrt()
}

/// `(sum_i w_i |a_i|^p)^(1/p)` with `|.|` the Euclidean magnitude at a node.
pub fn lp_norm<A: NodeField>(a: &A, p: f64, region: Region<'_>) -> f64 {
    let grid = *a.grid();
    let c = a.ncomp();
    let fa = a.flat();
    par::sum_indices(grid.len(), |i| {
        let w = region.weight(&grid, i);
        if w == 0.0 {
            return 0.0;
        }
        let m = (0..c).map(|k| fa[i * c + k] * fa[i * c + k]).sum::<f64>().sqrt();
        w * m.powf(p)
    })
    .powf(1.0 / p)
}

pub fn l1_norm<A: NodeField>(a: &A, region: Region<'_>) -> f64 {
    lp_norm(a, 1.0, region)
}
