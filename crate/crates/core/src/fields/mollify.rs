//! Convolution with a truncated, renormalized Gaussian.

use super::{FieldError, Grid3, LiftField, ScalarField, SphereMapField, VecField};
use crate::par;

/// Support radius in units of the standard deviation.
const SUPPORT: f64 = 3.0;

/// Nodes at which the full kernel fits inside the cube, i.e. whose distance
/// from the boundary is at least `3 * eps`.
pub fn mollification_region(grid: &Grid3, eps: f64) -> Vec<bool> {
    let reach = SUPPORT * eps;
    (0..grid.len())
        .map(|i| grid.boundary_distance(i) >= reach - 1e-12)
        .collect()
}

/// Mollifies raw node data; nodes outside [`mollification_region`] are copied.
pub fn mollify_nodes<const C: usize>(
    grid: &Grid3,
    data: &[[f64; C]],
    eps: f64,
) -> Result<Vec<[f64; C]>, FieldError> {
    let h = grid.h();
    if eps < h * (1.0 - 1e-12) {
        return Err(FieldError::WidthTooSmall { eps, h });
    }
    let reach = SUPPORT * eps;
    let r = (reach / h + 1e-9).floor() as isize;
    let n = grid.n() as isize;

    let mut offsets = Vec::new();
    let mut total = 0.0;
    for dk in -r..=r {
        for dj in -r..=r {
            for di in -r..=r {
                let d2 = ((di * di + dj * dj + dk * dk) as f64) * h * h;
                if d2 > reach * reach * (1.0 + 1e-12) {
                    continue;
                }
                let w = (-d2 / (2.0 * eps * eps)).exp();
                total += w;
                offsets.push(((dk * n + dj) * n + di, w));
            }
        }
    }
    for o in &mut offsets {
        o.1 /= total;
    }

    let region = mollification_region(grid, eps);
    Ok(par::map_indices(grid.len(), |idx| {
        if !region[idx] {
            return data[idx];
        }
        let mut out = [0.0; C];
        for &(off, w) in &offsets {
            let v = &data[(idx as isize + off) as usize];
            for c in 0..C {
                out[c] += w * v[c];
            }
        }
        out
    }))
}

/// Fields that can be mollified. Unit-valued fields leave the sphere under
/// averaging, so they come back as raw node arrays.
pub trait Mollify {
    type Output;
    fn mollify(&self, eps: f64) -> Result<Self::Output, FieldError>;
}

impl Mollify for ScalarField {
    type Output = ScalarField;
    fn mollify(&self, eps: f64) -> Result<ScalarField, FieldError> {
        let nodes: Vec<[f64; 1]> = self.values.iter().map(|&v| [v]).collect();
        let out = mollify_nodes(&self.grid, &nodes, eps)?;
        Ok(ScalarField {
            grid: self.grid,
            values: out.into_iter().map(|[v]| v).collect(),
        })
    }
}

impl Mollify for VecField {
    type Output = VecField;
    fn mollify(&self, eps: f64) -> Result<VecField, FieldError> {
        Ok(VecField {
            grid: self.grid,
            degree: self.degree,
            values: mollify_nodes(&self.grid, &self.values, eps)?,
        })
    }
}

impl Mollify for SphereMapField {
    type Output = Vec<[f64; 3]>;
    fn mollify(&self, eps: f64) -> Result<Vec<[f64; 3]>, FieldError> {
        mollify_nodes(&self.grid, &self.values, eps)
    }
}

impl Mollify for LiftField {
    type Output = Vec<[f64; 4]>;
    fn mollify(&self, eps: f64) -> Result<Vec<[f64; 4]>, FieldError> {
        mollify_nodes(&self.grid, &self.values, eps)
    }
}

pub fn mollify<F: Mollify>(field: &F, eps: f64) -> Result<F::Output, FieldError> {
    field.mollify(eps)
}
